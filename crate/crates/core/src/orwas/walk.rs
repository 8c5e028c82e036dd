//! Stratified starts and biased walks.

use alloc::vec::Vec;
use core::ops::Range;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::{OrwasError, SlotCounts, WalkConfig, Warning};
use crate::graph::FrozenGraph;

/// Random stream for walk `index`. The start is the stream's first draw.
pub fn walk_rng(seed: u64, index: usize) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(index as u64);
    rng
}

/// Start node of walk `index`: indices below the article share start at a
/// uniform article, the rest at a uniform V_h node (articles when V_h is
/// empty).
fn start_for<R: Rng>(graph: &FrozenGraph, cfg: &WalkConfig, index: usize, rng: &mut R) -> u32 {
    let hf = graph.high_frequency();
    let pool = if index < cfg.article_starts() || hf.is_empty() {
        graph.articles()
    } else {
        hf
    };
    pool[rng.random_range(0..pool.len())]
}

/// All W start nodes in walk-index order.
pub fn stratified_starts(graph: &FrozenGraph, cfg: &WalkConfig) -> Result<(Vec<u32>, Option<Warning>), OrwasError> {
    cfg.validate()?;
    if graph.articles().is_empty() {
        return Err(OrwasError::NoArticles);
    }
    let starts = (0..cfg.num_walks)
        .map(|i| start_for(graph, cfg, i, &mut walk_rng(cfg.seed, i)))
        .collect();
    let warn = graph.high_frequency().is_empty().then_some(Warning::EmptyHighFrequency);
    Ok((starts, warn))
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Path {
    pub nodes: Vec<u32>,
    /// The walk hit a node without neighbors before taking L steps.
    pub truncated: bool,
}

#[inline]
fn step<R: Rng>(graph: &FrozenGraph, u: u32, bias: f64, rng: &mut R) -> Option<u32> {
    let all = graph.neighbors(u);
    if all.is_empty() {
        return None;
    }
    if graph.is_article(u) && bias > 0.0 && rng.random::<f64>() < bias {
        let hf = graph.hf_neighbors(u);
        if !hf.is_empty() {
            return Some(hf[rng.random_range(0..hf.len())]);
        }
    }
    Some(all[rng.random_range(0..all.len())])
}

/// Appends a walk of up to `length` steps from `start` to `out` (start
/// included). Returns whether it was truncated.
pub fn walk_into<R: Rng>(graph: &FrozenGraph, start: u32, length: usize, bias: f64, rng: &mut R, out: &mut Vec<u32>) -> bool {
    out.push(start);
    let mut u = start;
    for _ in 0..length {
        match step(graph, u, bias, rng) {
            Some(v) => {
                out.push(v);
                u = v;
            }
            None => return true,
        }
    }
    false
}

pub fn random_walk<R: Rng>(graph: &FrozenGraph, start: u32, cfg: &WalkConfig, rng: &mut R) -> Path {
    let mut nodes = Vec::with_capacity(cfg.walk_length + 1);
    let truncated = walk_into(graph, start, cfg.walk_length, cfg.bias, rng, &mut nodes);
    Path { nodes, truncated }
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct WalkStats {
    pub walks: usize,
    pub article_starts: usize,
    pub high_frequency_starts: usize,
    pub transitions: u64,
    pub truncated: usize,
}

impl WalkStats {
    pub fn merge(&mut self, other: &WalkStats) {
        self.walks += other.walks;
        self.article_starts += other.article_starts;
        self.high_frequency_starts += other.high_frequency_starts;
        self.transitions += other.transitions;
        self.truncated += other.truncated;
    }
}

/// Runs walks `range` (a sub-range of `0..W`) and folds each path into `acc`.
/// Splitting `0..W` into any set of ranges and summing the accumulators gives
/// the same aggregate as one call over the whole range.
pub fn run_walks(graph: &FrozenGraph, cfg: &WalkConfig, range: Range<usize>, acc: &mut SlotCounts) -> Result<WalkStats, OrwasError> {
    cfg.validate()?;
    if graph.articles().is_empty() {
        return Err(OrwasError::NoArticles);
    }
    let from_articles = cfg.article_starts();
    let hf_empty = graph.high_frequency().is_empty();
    let mut stats = WalkStats::default();
    let mut path = Vec::with_capacity(cfg.walk_length + 1);
    for i in range {
        let mut rng = walk_rng(cfg.seed, i);
        let start = start_for(graph, cfg, i, &mut rng);
        if i < from_articles || hf_empty {
            stats.article_starts += 1;
        } else {
            stats.high_frequency_starts += 1;
        }
        path.clear();
        let truncated = walk_into(graph, start, cfg.walk_length, cfg.bias, &mut rng, &mut path);
        stats.walks += 1;
        stats.transitions += (path.len() - 1) as u64;
        stats.truncated += truncated as usize;
        acc.fold(graph, &path);
    }
    Ok(stats)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::KnowledgeGraph;
    use crate::kind::NodeKind;
    use crate::orwas::compute_high_frequency_set;
    use crate::record::NodeRecord;

    fn small() -> FrozenGraph {
        let mut g = KnowledgeGraph::new();
        let mut tags = Vec::new();
        for i in 0..4 {
            let r = NodeRecord::new(alloc::format!("p{i}"), "t")
                .with_field(NodeKind::ClassificationTags, "graphs")
                .with_field(NodeKind::Datasets, alloc::format!("d{i}"))
                .with_field(NodeKind::Metrics, alloc::format!("m{i}"));
            let t = g.add_paper_subgraph(&r).unwrap();
            tags.push(g.neighbors(t).unwrap()[0]);
        }
        for t in &tags[1..] {
            g.absorb(tags[0], *t).unwrap();
        }
        let (hf, _) = compute_high_frequency_set(&g, 0.9);
        g.set_high_frequency(hf).unwrap();
        g.freeze()
    }

    #[test]
    fn starts_split_and_repeat() {
        let g = small();
        let cfg = WalkConfig {
            num_walks: 10,
            ..Default::default()
        };
        let (s1, warn) = stratified_starts(&g, &cfg).unwrap();
        let (s2, _) = stratified_starts(&g, &cfg).unwrap();
        assert_eq!(s1, s2);
        assert!(warn.is_none());
        assert!(s1[..7].iter().all(|&v| g.is_article(v)));
        assert!(s1[7..].iter().all(|&v| g.is_high_frequency(v)));
    }

    #[test]
    fn full_bias_always_enters_high_frequency() {
        let g = small();
        let cfg = WalkConfig {
            bias: 1.0,
            walk_length: 50,
            ..Default::default()
        };
        for i in 0..50 {
            let p = random_walk(&g, g.articles()[i % 4], &cfg, &mut walk_rng(3, i));
            assert_eq!(p.nodes.len(), 51);
            for w in p.nodes.windows(2) {
                if g.is_article(w[0]) {
                    assert!(g.is_high_frequency(w[1]));
                }
            }
        }
    }

    #[test]
    fn isolated_start_is_truncated() {
        let mut g = KnowledgeGraph::new();
        g.add_paper_subgraph(&NodeRecord::new("p", "t")).unwrap();
        let g = g.freeze();
        let p = random_walk(&g, 0, &WalkConfig::default(), &mut walk_rng(0, 0));
        assert_eq!(p.nodes, [0]);
        assert!(p.truncated);
    }

    #[test]
    fn split_ranges_sum_to_whole() {
        let g = small();
        let cfg = WalkConfig {
            num_walks: 40,
            walk_length: 12,
            ..Default::default()
        };
        let mut whole = SlotCounts::new(&g);
        let s = run_walks(&g, &cfg, 0..40, &mut whole).unwrap();
        let mut a = SlotCounts::new(&g);
        let mut b = SlotCounts::new(&g);
        let mut s2 = run_walks(&g, &cfg, 0..13, &mut a).unwrap();
        s2.merge(&run_walks(&g, &cfg, 13..40, &mut b).unwrap());
        a.absorb(&b);
        assert_eq!(s, s2);
        assert_eq!(whole.into_aggregate(&g), a.into_aggregate(&g));
        assert_eq!(s.article_starts, 28);
        assert_eq!(s.transitions, 40 * 12);
    }
}
