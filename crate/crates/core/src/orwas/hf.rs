//! High-frequency key-information nodes (V_h).

use alloc::collections::BTreeSet;
use alloc::vec::Vec;

use super::Warning;
use crate::graph::{KnowledgeGraph, NodeId};

pub const DEFAULT_QUANTILE: f64 = 0.90;

/// Key-information nodes whose degree is at or above the `quantile` degree
/// among V_e.
///
/// The cut keeps the top `max(1, floor((1 - quantile) * |V_e|))` nodes by
/// degree and then every node tied with the last one kept, so equal-degree
/// nodes are never split.
pub fn compute_high_frequency_set(graph: &KnowledgeGraph, quantile: f64) -> (BTreeSet<NodeId>, Option<Warning>) {
    let keyinfo = graph.keyinfo();
    if keyinfo.is_empty() {
        return (BTreeSet::new(), Some(Warning::EmptyKeyInfo));
    }
    let q = quantile.clamp(0.0, 1.0);
    let n = keyinfo.len();
    let keep = (libm::floor((1.0 - q) * n as f64 + 1e-9) as usize).clamp(1, n);
    let mut degrees: Vec<usize> = keyinfo.iter().map(|id| graph.degree(*id)).collect();
    degrees.sort_unstable_by(|a, b| b.cmp(a));
    let cut = degrees[keep - 1];
    let set = keyinfo.iter().copied().filter(|id| graph.degree(*id) >= cut).collect();
    (set, None)
}
