//! Ranked combination files (JSON lines, best first) and their conversion to
//! routing views.

use std::path::Path;

use kgbench_core::orwas::{CandidateCombination, ScoreBreakdown};
use kgbench_core::taskgen::{ComboView, SharedNode};
use kgbench_core::{KnowledgeGraph, NodeId, PaperId};
use serde::{Deserialize, Serialize};

use super::{read_jsonl, write_jsonl, FormatError};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ComboRecord {
    /// 1-based.
    pub rank: usize,
    pub combo_id: String,
    pub paper_nodes: Vec<NodeId>,
    pub papers: Vec<PaperId>,
    pub shared: Vec<SharedNode>,
    pub anchor: NodeId,
    pub score: f64,
    pub breakdown: ScoreBreakdown,
}

pub fn combo_id(rank: usize) -> String {
    format!("c{rank:06}")
}

pub fn combo_records(ranked: &[CandidateCombination], graph: &KnowledgeGraph) -> Vec<ComboRecord> {
    ranked
        .iter()
        .enumerate()
        .map(|(i, c)| {
            let view = ComboView::from_candidate(combo_id(i + 1), c, graph);
            ComboRecord {
                rank: i + 1,
                combo_id: view.combo_id,
                paper_nodes: c.papers.clone(),
                papers: view.papers,
                shared: view.shared,
                anchor: c.anchor,
                score: c.score,
                breakdown: c.breakdown,
            }
        })
        .collect()
}

impl ComboRecord {
    pub fn view(&self) -> ComboView {
        ComboView {
            combo_id: self.combo_id.clone(),
            papers: self.papers.clone(),
            shared: self.shared.clone(),
            score: self.score,
        }
    }
}

pub fn write_combos(path: &Path, combos: &[ComboRecord]) -> Result<(), FormatError> {
    write_jsonl(path, combos)
}

pub fn read_combos(path: &Path) -> Result<Vec<ComboRecord>, FormatError> {
    read_jsonl(path)
}
