//! The article to key-information visit map.
//!
//! A path contributes a pair `(a, e)` when article `a` and key-information
//! node `e` both occur in the path and are adjacent in the graph. Each pair
//! counts at most once per path.

use alloc::collections::{BTreeMap, BTreeSet};
use alloc::vec::Vec;

use serde::{Deserialize, Serialize};

use super::{OrwasError, Path};
use crate::graph::{FrozenGraph, NodeId};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
pub struct PairCount {
    pub article: NodeId,
    pub keyinfo: NodeId,
    pub count: u32,
}

/// Pair counts sorted by `(article, keyinfo)`; every count is positive.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct PairAggregate {
    pairs: Vec<PairCount>,
}

impl PairAggregate {
    /// Builds from arbitrary pair counts; repeated keys are summed and zero
    /// counts dropped.
    pub fn from_pairs(pairs: impl IntoIterator<Item = PairCount>) -> Self {
        let mut m: BTreeMap<(NodeId, NodeId), u32> = BTreeMap::new();
        for p in pairs {
            *m.entry((p.article, p.keyinfo)).or_default() += p.count;
        }
        PairAggregate {
            pairs: m
                .into_iter()
                .filter(|(_, c)| *c > 0)
                .map(|((article, keyinfo), count)| PairCount { article, keyinfo, count })
                .collect(),
        }
    }

    pub fn len(&self) -> usize {
        self.pairs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.pairs.is_empty()
    }

    pub fn pairs(&self) -> &[PairCount] {
        &self.pairs
    }

    pub fn get(&self, article: NodeId, keyinfo: NodeId) -> u32 {
        self.pairs
            .binary_search_by(|p| (p.article, p.keyinfo).cmp(&(article, keyinfo)))
            .map_or(0, |i| self.pairs[i].count)
    }

    pub fn num_articles(&self) -> usize {
        let mut n = 0;
        let mut last = None;
        for p in &self.pairs {
            if last != Some(p.article) {
                n += 1;
                last = Some(p.article);
            }
        }
        n
    }

    /// Key-information nodes co-visited with each article.
    pub fn per_article(&self) -> BTreeMap<NodeId, BTreeSet<NodeId>> {
        let mut out: BTreeMap<NodeId, BTreeSet<NodeId>> = BTreeMap::new();
        for p in &self.pairs {
            out.entry(p.article).or_default().insert(p.keyinfo);
        }
        out
    }

    pub fn merge(&self, other: &PairAggregate) -> PairAggregate {
        PairAggregate::from_pairs(self.pairs.iter().chain(&other.pairs).copied())
    }

    /// Every pair must be an article / key-information edge of `graph`.
    pub fn check_against(&self, graph: &FrozenGraph) -> Result<(), OrwasError> {
        for p in &self.pairs {
            let (a, e) = (p.article.0, p.keyinfo.0);
            let ok = graph.contains(a)
                && graph.contains(e)
                && graph.is_article(a)
                && !graph.is_article(e)
                && graph.has_edge(a, e);
            if !ok {
                return Err(OrwasError::ForeignPair(a, e));
            }
        }
        Ok(())
    }
}

/// Dense per-edge-slot counters for folding many paths quickly. One instance
/// per worker; instances combine with [`SlotCounts::absorb`].
#[derive(Debug, Clone)]
pub struct SlotCounts {
    counts: Vec<u32>,
    stamp: Vec<u32>,
    epoch: u32,
}

impl SlotCounts {
    pub fn new(graph: &FrozenGraph) -> Self {
        SlotCounts {
            counts: alloc::vec![0; graph.num_slots()],
            stamp: alloc::vec![0; graph.id_bound()],
            epoch: 0,
        }
    }

    fn next_epoch(&mut self) -> u32 {
        // Stamps use epoch (in path) and epoch + 1 (article already folded).
        if self.epoch >= u32::MAX - 4 {
            self.stamp.iter_mut().for_each(|s| *s = 0);
            self.epoch = 0;
        }
        self.epoch += 2;
        self.epoch
    }

    pub fn fold(&mut self, graph: &FrozenGraph, path: &[u32]) {
        let base = self.next_epoch();
        for &v in path {
            self.stamp[v as usize] = base;
        }
        for &a in path {
            if !graph.is_article(a) || self.stamp[a as usize] != base {
                continue;
            }
            self.stamp[a as usize] = base + 1;
            let off = graph.slot_offset(a);
            for (j, &e) in graph.neighbors(a).iter().enumerate() {
                if self.stamp[e as usize] >= base && !graph.is_article(e) {
                    self.counts[off + j] += 1;
                }
            }
        }
    }

    pub fn absorb(&mut self, other: &SlotCounts) {
        for (a, b) in self.counts.iter_mut().zip(&other.counts) {
            *a += b;
        }
    }

    pub fn into_aggregate(self, graph: &FrozenGraph) -> PairAggregate {
        let mut pairs = Vec::new();
        for &a in graph.articles() {
            let off = graph.slot_offset(a);
            for (j, &e) in graph.neighbors(a).iter().enumerate() {
                let count = self.counts[off + j];
                if count > 0 {
                    pairs.push(PairCount {
                        article: NodeId(a),
                        keyinfo: NodeId(e),
                        count,
                    });
                }
            }
        }
        PairAggregate { pairs }
    }
}

/// Folds `paths` into a fresh aggregate.
pub fn aggregate(graph: &FrozenGraph, paths: &[Path]) -> PairAggregate {
    let mut acc = SlotCounts::new(graph);
    for p in paths {
        acc.fold(graph, &p.nodes);
    }
    acc.into_aggregate(graph)
}
