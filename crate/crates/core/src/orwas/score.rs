//! Composite ranking of candidate paper sets.
//!
//! * coverage: sum over shared nodes of their degree quantile within V_e, so
//!   widely shared entities weigh more;
//! * diversity: distinct kinds among shared nodes over 13;
//! * consistency: over member pairs, the mean fraction of each paper's
//!   key-information nodes that the pair shares;
//! * redundancy: minus the fraction of shared nodes already claimed by
//!   combinations ranked ahead on the other three terms.

use alloc::collections::BTreeSet;
use alloc::vec::Vec;
use core::cmp::Ordering;

use hashbrown::HashSet;
use serde::{Deserialize, Serialize};

use super::CandidateCombination;
use crate::graph::{FrozenGraph, NodeId};
use crate::kind::NodeKind;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ScoreWeights {
    pub coverage: f64,
    pub diversity: f64,
    pub consistency: f64,
    pub redundancy: f64,
}

impl Default for ScoreWeights {
    fn default() -> Self {
        ScoreWeights {
            coverage: 1.0,
            diversity: 1.0,
            consistency: 1.0,
            redundancy: 0.5,
        }
    }
}

impl ScoreWeights {
    pub const ZERO: ScoreWeights = ScoreWeights {
        coverage: 0.0,
        diversity: 0.0,
        consistency: 0.0,
        redundancy: 0.0,
    };

    pub fn scaled(&self, f: f64) -> ScoreWeights {
        ScoreWeights {
            coverage: self.coverage * f,
            diversity: self.diversity * f,
            consistency: self.consistency * f,
            redundancy: self.redundancy * f,
        }
    }

    pub fn is_valid(&self) -> bool {
        [self.coverage, self.diversity, self.consistency, self.redundancy]
            .iter()
            .all(|w| w.is_finite() && *w >= 0.0)
    }

    fn base(&self, b: &ScoreBreakdown) -> f64 {
        self.coverage * b.coverage + self.diversity * b.diversity + self.consistency * b.consistency
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
pub struct ScoreBreakdown {
    pub coverage: f64,
    pub diversity: f64,
    pub consistency: f64,
    /// In [-1, 0].
    pub redundancy: f64,
}

/// Degree distribution of V_e, for the coverage term.
#[derive(Debug, Clone)]
pub struct ScoringContext {
    sorted_degrees: Vec<usize>,
}

impl ScoringContext {
    pub fn new(graph: &FrozenGraph) -> Self {
        let mut sorted_degrees: Vec<usize> = graph.keyinfo().iter().map(|&e| graph.degree(e)).collect();
        sorted_degrees.sort_unstable();
        ScoringContext { sorted_degrees }
    }

    /// Fraction of V_e with degree at most `degree`.
    pub fn degree_quantile(&self, degree: usize) -> f64 {
        if self.sorted_degrees.is_empty() {
            return 0.0;
        }
        let at_most = self.sorted_degrees.partition_point(|&d| d <= degree);
        at_most as f64 / self.sorted_degrees.len() as f64
    }
}

fn intersection_len(a: &[u32], b: &[u32]) -> usize {
    let (mut i, mut j, mut n) = (0, 0, 0);
    while i < a.len() && j < b.len() {
        match a[i].cmp(&b[j]) {
            Ordering::Less => i += 1,
            Ordering::Greater => j += 1,
            Ordering::Equal => {
                n += 1;
                i += 1;
                j += 1;
            }
        }
    }
    n
}

/// Coverage, diversity and consistency of one combination. Redundancy is
/// left at 0; it depends on the rest of the ranking.
pub fn score_terms(papers: &[NodeId], shared: &[NodeId], graph: &FrozenGraph, ctx: &ScoringContext) -> ScoreBreakdown {
    let coverage = shared.iter().map(|e| ctx.degree_quantile(graph.degree(e.0))).sum();
    let kinds: BTreeSet<NodeKind> = shared.iter().filter_map(|e| graph.kind(e.0)).collect();
    let diversity = kinds.len() as f64 / NodeKind::ALL.len() as f64;

    let mut total = 0.0;
    let mut pairs = 0usize;
    for (i, a) in papers.iter().enumerate() {
        for b in &papers[i + 1..] {
            let na = graph.neighbors(a.0);
            let nb = graph.neighbors(b.0);
            let common = intersection_len(na, nb) as f64;
            let fa = if na.is_empty() { 0.0 } else { common / na.len() as f64 };
            let fb = if nb.is_empty() { 0.0 } else { common / nb.len() as f64 };
            total += (fa + fb) / 2.0;
            pairs += 1;
        }
    }
    let consistency = if pairs == 0 { 0.0 } else { total / pairs as f64 };

    ScoreBreakdown {
        coverage,
        diversity,
        consistency,
        redundancy: 0.0,
    }
}

/// Fills the coverage, diversity and consistency terms and sets `score` to
/// their weighted sum.
pub fn score_combination(combo: &mut CandidateCombination, graph: &FrozenGraph, ctx: &ScoringContext, weights: &ScoreWeights) {
    combo.breakdown = score_terms(&combo.papers, &combo.shared_nodes, graph, ctx);
    combo.score = weights.base(&combo.breakdown);
}

/// Lexicographic order of the members' paper ids.
fn paper_key(graph: &FrozenGraph, c: &CandidateCombination) -> Vec<u32> {
    let mut ranks: Vec<u32> = c.papers.iter().map(|p| graph.paper_rank(p.0)).collect();
    ranks.sort_unstable();
    ranks
}

fn sort_ranked(graph: &FrozenGraph, combos: Vec<CandidateCombination>) -> Vec<CandidateCombination> {
    let mut keyed: Vec<(Vec<u32>, CandidateCombination)> = combos.into_iter().map(|c| (paper_key(graph, &c), c)).collect();
    keyed.sort_by(|(ka, a), (kb, b)| b.score.total_cmp(&a.score).then_with(|| ka.cmp(kb)));
    keyed.into_iter().map(|(_, c)| c).collect()
}

/// Scores every combination and returns them best first, ties broken by
/// paper ids.
pub fn rank_combinations(combos: Vec<CandidateCombination>, graph: &FrozenGraph, weights: &ScoreWeights) -> Vec<CandidateCombination> {
    let ctx = ScoringContext::new(graph);
    let mut combos = combos;
    for c in &mut combos {
        score_combination(c, graph, &ctx, weights);
    }
    let mut ranked = sort_ranked(graph, combos);

    let mut used: HashSet<NodeId> = HashSet::new();
    for c in &mut ranked {
        let overlap = c.shared_nodes.iter().filter(|e| used.contains(*e)).count();
        c.breakdown.redundancy = if c.shared_nodes.is_empty() {
            0.0
        } else {
            -(overlap as f64) / c.shared_nodes.len() as f64
        };
        used.extend(c.shared_nodes.iter().copied());
        c.score = weights.base(&c.breakdown) + weights.redundancy * c.breakdown.redundancy;
    }
    sort_ranked(graph, ranked)
}

/// Unweighted coverage summed over combinations.
pub fn quality_score(combos: &[CandidateCombination]) -> f64 {
    combos.iter().map(|c| c.breakdown.coverage).sum()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::KnowledgeGraph;
    use crate::record::NodeRecord;

    #[test]
    fn degree_quantile_counts_ties() {
        let ctx = ScoringContext {
            sorted_degrees: alloc::vec![1, 1, 2, 5],
        };
        assert_eq!(ctx.degree_quantile(0), 0.0);
        assert_eq!(ctx.degree_quantile(1), 0.5);
        assert_eq!(ctx.degree_quantile(5), 1.0);
    }

    #[test]
    fn terms_on_a_hand_built_pair() {
        // p0: {tag, d0}, p1: {tag, d1, m1}; tag shared.
        let mut g = KnowledgeGraph::new();
        let a = g
            .add_paper_subgraph(&NodeRecord::new("p0", "t").with_field(NodeKind::ClassificationTags, "x").with_field(NodeKind::Datasets, "d0"))
            .unwrap();
        let b = g
            .add_paper_subgraph(
                &NodeRecord::new("p1", "t")
                    .with_field(NodeKind::ClassificationTags, "x")
                    .with_field(NodeKind::Datasets, "d1")
                    .with_field(NodeKind::Metrics, "m1"),
            )
            .unwrap();
        let tag = g.neighbors(a).unwrap()[0];
        let tag_b = g.neighbors(b).unwrap()[0];
        g.absorb(tag, tag_b).unwrap();
        let f = g.freeze();
        let ctx = ScoringContext::new(&f);
        let t = score_terms(&[a, b], &[tag], &f, &ctx);
        // V_e degrees: tag 2, d0 1, d1 1, m1 1.
        assert_eq!(t.coverage, 1.0);
        assert_eq!(t.diversity, 1.0 / 13.0);
        assert!((t.consistency - (0.5 + 1.0 / 3.0) / 2.0).abs() < 1e-12);
    }
}
