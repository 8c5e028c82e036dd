//! Constrained enumeration of paper sets.
//!
//! Every key-information node `e` in the aggregate anchors a pool: the papers
//! co-visited with `e` at least `min_support` times, best supported first and
//! cut to `anchor_fanout`. Candidates are the k-subsets of each pool. Anchors
//! are visited by descending total support (ties by id), subsets in
//! lexicographic order, duplicates skipped, and enumeration stops after
//! `max_combinations` distinct sets.

use alloc::collections::{BTreeMap, BinaryHeap};
use alloc::vec::Vec;
use core::cmp::Reverse;

use hashbrown::HashSet;
use serde::{Deserialize, Serialize};

use super::{PairAggregate, ScoreBreakdown, SelectionConfig, Warning};
use crate::graph::{FrozenGraph, NodeId};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CandidateCombination {
    /// Article ids, ascending.
    pub papers: Vec<NodeId>,
    /// Key-information nodes adjacent to at least two members, ascending.
    pub shared_nodes: Vec<NodeId>,
    /// Node whose pool produced the set first.
    pub anchor: NodeId,
    pub score: f64,
    pub breakdown: ScoreBreakdown,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Enumeration {
    /// In enumeration order.
    pub combinations: Vec<CandidateCombination>,
    /// Distinct sets encountered, including evicted ones.
    pub seen: usize,
    pub evictions: usize,
    /// Stopped because `max_combinations` distinct sets were reached.
    pub cap_reached: bool,
    pub warnings: Vec<Warning>,
}

/// Rough heap footprint of one stored candidate.
pub fn candidate_bytes(k: usize) -> usize {
    4 * k + 48
}

/// Key-information nodes adjacent to at least two of `papers`.
pub fn shared_nodes(graph: &FrozenGraph, papers: &[NodeId]) -> Vec<NodeId> {
    let mut all: Vec<u32> = papers
        .iter()
        .flat_map(|p| graph.neighbors(p.0).iter().copied())
        .filter(|&e| !graph.is_article(e))
        .collect();
    all.sort_unstable();
    let mut out = Vec::new();
    let mut i = 0;
    while i < all.len() {
        let mut j = i + 1;
        while j < all.len() && all[j] == all[i] {
            j += 1;
        }
        if j - i >= 2 {
            out.push(NodeId(all[i]));
        }
        i = j;
    }
    out
}

struct Pool {
    anchor: u32,
    support: u64,
    /// (count, article), best first.
    members: Vec<(u32, u32)>,
}

fn build_pools(agg: &PairAggregate, cfg: &SelectionConfig) -> Vec<Pool> {
    let mut by_anchor: BTreeMap<u32, Vec<(u32, u32)>> = BTreeMap::new();
    for p in agg.pairs() {
        if p.count >= cfg.min_support {
            by_anchor.entry(p.keyinfo.0).or_default().push((p.count, p.article.0));
        }
    }
    let mut pools: Vec<Pool> = by_anchor
        .into_iter()
        .filter(|(_, m)| m.len() >= cfg.combo_size)
        .map(|(anchor, mut members)| {
            members.sort_unstable_by(|a, b| b.0.cmp(&a.0).then(a.1.cmp(&b.1)));
            let support = members.iter().map(|m| m.0 as u64).sum();
            if let Some(f) = cfg.anchor_fanout {
                members.truncate(f);
            }
            Pool { anchor, support, members }
        })
        .collect();
    pools.sort_by(|a, b| b.support.cmp(&a.support).then(a.anchor.cmp(&b.anchor)));
    pools
}

/// Advances `idx` to the next k-combination of `0..n` in lexicographic order.
fn next_combination(idx: &mut [usize], n: usize) -> bool {
    let k = idx.len();
    let mut i = k;
    while i > 0 {
        i -= 1;
        if idx[i] < n - k + i {
            idx[i] += 1;
            for j in i + 1..k {
                idx[j] = idx[j - 1] + 1;
            }
            return true;
        }
    }
    false
}

struct Stored {
    provisional: u64,
    seq: usize,
    papers: Vec<u32>,
    anchor: u32,
}

impl PartialEq for Stored {
    fn eq(&self, o: &Self) -> bool {
        self.seq == o.seq
    }
}
impl Eq for Stored {}
impl PartialOrd for Stored {
    fn partial_cmp(&self, o: &Self) -> Option<core::cmp::Ordering> {
        Some(self.cmp(o))
    }
}
impl Ord for Stored {
    /// Greater is more worth keeping: higher provisional score, then earlier.
    fn cmp(&self, o: &Self) -> core::cmp::Ordering {
        self.provisional.cmp(&o.provisional).then(o.seq.cmp(&self.seq))
    }
}

pub fn enumerate_combinations(agg: &PairAggregate, graph: &FrozenGraph, cfg: &SelectionConfig) -> Enumeration {
    let k = cfg.combo_size;
    let mut out = Enumeration {
        combinations: Vec::new(),
        seen: 0,
        evictions: 0,
        cap_reached: false,
        warnings: Vec::new(),
    };
    let n = agg.num_articles();
    if k > n {
        out.warnings.push(Warning::ComboLargerThanPopulation { k, articles: n });
        return out;
    }

    let capacity = (cfg.max_candidate_memory / candidate_bytes(k)).max(1);
    let mut seen: HashSet<Vec<u32>> = HashSet::new();
    // Min-heap on worth, so the root is the first to evict.
    let mut store: BinaryHeap<Reverse<Stored>> = BinaryHeap::new();

    'anchors: for pool in build_pools(agg, cfg) {
        let mut members = pool.members;
        members.sort_unstable_by_key(|m| m.1);
        let m = members.len();
        let mut idx: Vec<usize> = (0..k).collect();
        loop {
            let papers: Vec<u32> = idx.iter().map(|&i| members[i].1).collect();
            if !seen.contains(&papers) {
                seen.insert(papers.clone());
                let cand = Stored {
                    provisional: idx.iter().map(|&i| members[i].0 as u64).sum(),
                    seq: out.seen,
                    papers,
                    anchor: pool.anchor,
                };
                out.seen += 1;
                if store.len() < capacity {
                    store.push(Reverse(cand));
                } else {
                    out.evictions += 1;
                    if cand > store.peek().expect("capacity >= 1").0 {
                        store.pop();
                        store.push(Reverse(cand));
                    }
                }
                if out.seen >= cfg.max_combinations {
                    out.cap_reached = true;
                    break 'anchors;
                }
            }
            if !next_combination(&mut idx, m) {
                break;
            }
        }
    }

    let mut kept: Vec<Stored> = store.into_iter().map(|r| r.0).collect();
    kept.sort_unstable_by_key(|s| s.seq);
    for s in kept {
        let papers: Vec<NodeId> = s.papers.into_iter().map(NodeId).collect();
        let shared = shared_nodes(graph, &papers);
        if shared.is_empty() {
            continue;
        }
        out.combinations.push(CandidateCombination {
            papers,
            shared_nodes: shared,
            anchor: NodeId(s.anchor),
            score: 0.0,
            breakdown: ScoreBreakdown::default(),
        });
    }
    out
}
