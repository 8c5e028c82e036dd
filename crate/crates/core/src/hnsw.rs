//! Inner-product nearest-neighbor indexes.
//!
//! [`HnswIndex`] is a hierarchical navigable small-world graph: every item is
//! assigned a random top layer with exponentially decaying probability, upper
//! layers route greedily toward the query and layer 0 is searched with a beam.
//! [`FlatIndex`] is the exact scan with the same interface; it is the oracle
//! for the approximate index and the backend for small partitions.
//!
//! Similarity is the raw inner product. Callers that want cosine normalise
//! vectors first.

use alloc::collections::BinaryHeap;
use alloc::vec::Vec;
use core::cmp::Ordering;

use hashbrown::HashSet;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::vector::dot;

/// Exact or approximate top-k search over a fixed set of vectors addressed by
/// insertion index.
pub trait VectorSearch {
    fn len(&self) -> usize;

    fn is_empty(&self) -> bool {
        self.len() == 0
    }

    fn dimension(&self) -> usize;

    fn vector(&self, idx: usize) -> &[f32];

    /// Up to `k` `(index, similarity)` pairs, by descending similarity with
    /// ties broken by ascending index.
    fn search(&self, query: &[f32], k: usize) -> Vec<(usize, f32)>;
}

#[derive(Debug, Clone, Copy)]
struct Scored {
    sim: f32,
    idx: u32,
}

impl PartialEq for Scored {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == Ordering::Equal
    }
}

impl Eq for Scored {}

impl PartialOrd for Scored {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Scored {
    /// Greater means better: higher similarity, then lower index.
    fn cmp(&self, other: &Self) -> Ordering {
        self.sim
            .total_cmp(&other.sim)
            .then_with(|| other.idx.cmp(&self.idx))
    }
}

fn sort_best_first(v: &mut [(usize, f32)]) {
    v.sort_by(|a, b| b.1.total_cmp(&a.1).then(a.0.cmp(&b.0)));
}

/// Exact inner-product scan.
#[derive(Debug, Clone, Default)]
pub struct FlatIndex {
    dim: usize,
    data: Vec<f32>,
}

impl FlatIndex {
    pub fn new(dim: usize) -> Self {
        FlatIndex {
            dim,
            data: Vec::new(),
        }
    }

    pub fn add(&mut self, v: &[f32]) -> usize {
        assert_eq!(v.len(), self.dim, "dimension mismatch");
        self.data.extend_from_slice(v);
        self.len() - 1
    }
}

impl VectorSearch for FlatIndex {
    fn len(&self) -> usize {
        self.data.len().checked_div(self.dim).unwrap_or(0)
    }

    fn dimension(&self) -> usize {
        self.dim
    }

    fn vector(&self, idx: usize) -> &[f32] {
        &self.data[idx * self.dim..(idx + 1) * self.dim]
    }

    fn search(&self, query: &[f32], k: usize) -> Vec<(usize, f32)> {
        if k == 0 {
            return Vec::new();
        }
        let mut heap: BinaryHeap<core::cmp::Reverse<Scored>> = BinaryHeap::with_capacity(k + 1);
        for idx in 0..self.len() {
            let s = Scored {
                sim: dot(query, self.vector(idx)),
                idx: idx as u32,
            };
            if heap.len() < k {
                heap.push(core::cmp::Reverse(s));
            } else if s > heap.peek().unwrap().0 {
                heap.pop();
                heap.push(core::cmp::Reverse(s));
            }
        }
        let mut out: Vec<(usize, f32)> = heap.into_iter().map(|r| (r.0.idx as usize, r.0.sim)).collect();
        sort_best_first(&mut out);
        out
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HnswParams {
    /// Max links per node on layers >= 1; layer 0 allows twice as many.
    pub max_links: usize,
    pub ef_construction: usize,
    pub ef_search: usize,
    pub seed: u64,
}

impl Default for HnswParams {
    fn default() -> Self {
        HnswParams {
            max_links: 32,
            ef_construction: 50,
            ef_search: 30,
            seed: 0x5eed,
        }
    }
}

#[derive(Debug, Clone)]
pub struct HnswIndex {
    params: HnswParams,
    dim: usize,
    data: Vec<f32>,
    /// links[node][layer] -> neighbor indices
    links: Vec<Vec<Vec<u32>>>,
    entry: Option<u32>,
    top_layer: usize,
    level_mult: f64,
    rng: ChaCha8Rng,
}

impl HnswIndex {
    pub fn new(dim: usize, params: HnswParams) -> Self {
        let m = params.max_links.max(2);
        HnswIndex {
            params: HnswParams { max_links: m, ..params },
            dim,
            data: Vec::new(),
            links: Vec::new(),
            entry: None,
            top_layer: 0,
            level_mult: 1.0 / libm::log(m as f64),
            rng: ChaCha8Rng::seed_from_u64(params.seed),
        }
    }

    pub fn params(&self) -> HnswParams {
        self.params
    }

    fn max_links_at(&self, layer: usize) -> usize {
        if layer == 0 {
            2 * self.params.max_links
        } else {
            self.params.max_links
        }
    }

    fn sim(&self, q: &[f32], idx: u32) -> f32 {
        dot(q, self.vector(idx as usize))
    }

    fn random_level(&mut self) -> usize {
        // 1 - u keeps the argument of ln in (0, 1].
        let u: f64 = 1.0 - self.rng.random::<f64>();
        let level = (-libm::log(u) * self.level_mult) as usize;
        level.min(16)
    }

    pub fn add(&mut self, v: &[f32]) -> usize {
        assert_eq!(v.len(), self.dim, "dimension mismatch");
        let idx = self.links.len() as u32;
        self.data.extend_from_slice(v);
        let level = self.random_level();
        self.links.push(alloc::vec![Vec::new(); level + 1]);

        let Some(mut ep) = self.entry else {
            self.entry = Some(idx);
            self.top_layer = level;
            return idx as usize;
        };

        let q = v.to_vec();
        let mut layer = self.top_layer;
        while layer > level {
            ep = self.greedy(&q, ep, layer);
            layer -= 1;
        }
        let mut eps = alloc::vec![ep];
        for layer in (0..=level.min(self.top_layer)).rev() {
            let found = self.search_layer(&q, &eps, self.params.ef_construction, layer);
            let chosen = self.select_neighbors(&found, self.params.max_links);
            for &n in &chosen {
                self.links[idx as usize][layer].push(n.idx);
                self.connect(n.idx, idx, layer);
            }
            eps = found.iter().map(|s| s.idx).collect();
        }
        if level > self.top_layer {
            self.top_layer = level;
            self.entry = Some(idx);
        }
        idx as usize
    }

    /// Adds `to` to `from`'s link list, pruning with the neighbor heuristic
    /// when the list overflows.
    fn connect(&mut self, from: u32, to: u32, layer: usize) {
        let cap = self.max_links_at(layer);
        let list = &mut self.links[from as usize][layer];
        if list.contains(&to) {
            return;
        }
        list.push(to);
        if list.len() <= cap {
            return;
        }
        let base = self.vector(from as usize).to_vec();
        let mut cands: Vec<Scored> = self.links[from as usize][layer]
            .iter()
            .map(|&n| Scored {
                sim: self.sim(&base, n),
                idx: n,
            })
            .collect();
        cands.sort_by(|a, b| b.cmp(a));
        let kept = self.select_neighbors(&cands, cap);
        self.links[from as usize][layer] = kept.into_iter().map(|s| s.idx).collect();
    }

    /// Neighbor-selection heuristic: keep a candidate only if it is closer to
    /// the base than to every already kept neighbor, then top up with the
    /// best pruned candidates. `cands` must be sorted best first.
    fn select_neighbors(&self, cands: &[Scored], m: usize) -> Vec<Scored> {
        let mut kept: Vec<Scored> = Vec::with_capacity(m);
        let mut pruned = Vec::new();
        for &c in cands {
            if kept.len() >= m {
                break;
            }
            let cv = self.vector(c.idx as usize);
            let diverse = kept.iter().all(|k| dot(cv, self.vector(k.idx as usize)) < c.sim);
            if diverse {
                kept.push(c);
            } else {
                pruned.push(c);
            }
        }
        for c in pruned {
            if kept.len() >= m {
                break;
            }
            kept.push(c);
        }
        kept
    }

    fn greedy(&self, q: &[f32], mut ep: u32, layer: usize) -> u32 {
        let mut best = self.sim(q, ep);
        loop {
            let mut moved = false;
            for &n in &self.links[ep as usize][layer] {
                let s = self.sim(q, n);
                if s > best || (s == best && n < ep) {
                    best = s;
                    ep = n;
                    moved = true;
                }
            }
            if !moved {
                return ep;
            }
        }
    }

    /// Beam search on one layer. Returns up to `ef` results, best first.
    fn search_layer(&self, q: &[f32], eps: &[u32], ef: usize, layer: usize) -> Vec<Scored> {
        let mut visited: HashSet<u32> = HashSet::with_capacity(ef * 4);
        let mut frontier: BinaryHeap<Scored> = BinaryHeap::new();
        let mut results: BinaryHeap<core::cmp::Reverse<Scored>> = BinaryHeap::new();
        for &e in eps {
            if visited.insert(e) {
                let s = Scored {
                    sim: self.sim(q, e),
                    idx: e,
                };
                frontier.push(s);
                results.push(core::cmp::Reverse(s));
                if results.len() > ef {
                    results.pop();
                }
            }
        }
        while let Some(c) = frontier.pop() {
            let worst = results.peek().unwrap().0;
            if results.len() >= ef && c < worst {
                break;
            }
            for &n in &self.links[c.idx as usize][layer] {
                if !visited.insert(n) {
                    continue;
                }
                let s = Scored {
                    sim: self.sim(q, n),
                    idx: n,
                };
                if results.len() < ef || s > results.peek().unwrap().0 {
                    frontier.push(s);
                    results.push(core::cmp::Reverse(s));
                    if results.len() > ef {
                        results.pop();
                    }
                }
            }
        }
        let mut out: Vec<Scored> = results.into_iter().map(|r| r.0).collect();
        out.sort_by(|a, b| b.cmp(a));
        out
    }

    /// Top-k with an explicit beam width; the beam is clamped to at least `k`.
    pub fn search_with_beam(&self, query: &[f32], k: usize, beam: usize) -> Vec<(usize, f32)> {
        let Some(mut ep) = self.entry else {
            return Vec::new();
        };
        if k == 0 {
            return Vec::new();
        }
        for layer in (1..=self.top_layer).rev() {
            ep = self.greedy(query, ep, layer);
        }
        let found = self.search_layer(query, &[ep], beam.max(k), 0);
        let mut out: Vec<(usize, f32)> = found.into_iter().take(k).map(|s| (s.idx as usize, s.sim)).collect();
        sort_best_first(&mut out);
        out
    }
}

impl VectorSearch for HnswIndex {
    fn len(&self) -> usize {
        self.links.len()
    }

    fn dimension(&self) -> usize {
        self.dim
    }

    fn vector(&self, idx: usize) -> &[f32] {
        &self.data[idx * self.dim..(idx + 1) * self.dim]
    }

    fn search(&self, query: &[f32], k: usize) -> Vec<(usize, f32)> {
        self.search_with_beam(query, k, self.params.ef_search)
    }
}
