//! Structural statistics: density, average degree, diameter, average
//! shortest-path length and node-kind histogram.
//!
//! Density and average degree use the undirected formulas `2E / (N(N-1))` and
//! `2E / N` over the whole graph. Path statistics are taken over the largest
//! connected component, whose size is reported alongside.

use alloc::collections::BTreeMap;
use alloc::vec::Vec;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::graph::FrozenGraph;
use crate::kind::NodeKind;

#[derive(Debug, Clone, Copy, PartialEq, Eq, thiserror::Error)]
pub enum StatsError {
    #[error("density is undefined for {0} nodes")]
    TooFewNodes(usize),
    #[error("graph is empty")]
    EmptyGraph,
}

/// Undirected adjacency addressed by raw ids; ids may have holes.
pub trait Adjacency {
    fn id_bound(&self) -> usize;
    fn is_present(&self, v: u32) -> bool;
    fn adjacent(&self, v: u32) -> &[u32];
}

impl Adjacency for FrozenGraph {
    fn id_bound(&self) -> usize {
        FrozenGraph::id_bound(self)
    }

    fn is_present(&self, v: u32) -> bool {
        self.contains(v)
    }

    fn adjacent(&self, v: u32) -> &[u32] {
        self.neighbors(v)
    }
}

impl Adjacency for [Vec<u32>] {
    fn id_bound(&self) -> usize {
        self.len()
    }

    fn is_present(&self, v: u32) -> bool {
        (v as usize) < self.len()
    }

    fn adjacent(&self, v: u32) -> &[u32] {
        &self[v as usize]
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DensityDegree {
    pub density: f64,
    pub avg_degree: f64,
}

pub fn density_and_degree(num_nodes: usize, num_edges: usize) -> Result<DensityDegree, StatsError> {
    if num_nodes < 2 {
        return Err(StatsError::TooFewNodes(num_nodes));
    }
    let n = num_nodes as f64;
    let e2 = 2.0 * num_edges as f64;
    Ok(DensityDegree {
        density: e2 / (n * (n - 1.0)),
        avg_degree: e2 / n,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BasicStats {
    pub num_nodes: usize,
    pub num_edges: usize,
    pub density: f64,
    pub avg_degree: f64,
    pub kind_histogram: BTreeMap<NodeKind, usize>,
}

pub fn basic_stats(graph: &FrozenGraph) -> Result<BasicStats, StatsError> {
    let dd = density_and_degree(graph.num_nodes(), graph.num_edges())?;
    let mut kind_histogram = BTreeMap::new();
    for v in 0..graph.id_bound() as u32 {
        if let Some(k) = graph.kind(v) {
            *kind_histogram.entry(k).or_insert(0) += 1;
        }
    }
    Ok(BasicStats {
        num_nodes: graph.num_nodes(),
        num_edges: graph.num_edges(),
        density: dd.density,
        avg_degree: dd.avg_degree,
        kind_histogram,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "mode", rename_all = "snake_case")]
pub enum PathMode {
    Exact,
    Sampled { sources: usize, seed: u64 },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PathStats {
    pub diameter: u32,
    /// Set when sources were sampled; the true diameter may be larger.
    pub diameter_is_lower_bound: bool,
    pub avg_path_length: f64,
    pub sources: usize,
    pub components: usize,
    pub largest_component: usize,
}

/// Connected components as lists of ids, largest first (ties by smallest id).
pub fn components<G: Adjacency + ?Sized>(g: &G) -> Vec<Vec<u32>> {
    let n = g.id_bound();
    let mut seen = alloc::vec![false; n];
    let mut out = Vec::new();
    for s in 0..n as u32 {
        if !g.is_present(s) || seen[s as usize] {
            continue;
        }
        seen[s as usize] = true;
        let mut comp = alloc::vec![s];
        let mut head = 0;
        while head < comp.len() {
            let u = comp[head];
            head += 1;
            for &v in g.adjacent(u) {
                if !seen[v as usize] {
                    seen[v as usize] = true;
                    comp.push(v);
                }
            }
        }
        comp.sort_unstable();
        out.push(comp);
    }
    out.sort_by(|a, b| b.len().cmp(&a.len()).then(a[0].cmp(&b[0])));
    out
}

/// BFS from `s`; returns (eccentricity, sum of distances to reached nodes).
fn bfs<G: Adjacency + ?Sized>(g: &G, s: u32, dist: &mut [u32], queue: &mut Vec<u32>) -> (u32, u64) {
    queue.clear();
    queue.push(s);
    dist[s as usize] = 0;
    let mut head = 0;
    let (mut ecc, mut sum) = (0u32, 0u64);
    while head < queue.len() {
        let u = queue[head];
        head += 1;
        let du = dist[u as usize];
        ecc = ecc.max(du);
        sum += du as u64;
        for &v in g.adjacent(u) {
            if dist[v as usize] == u32::MAX {
                dist[v as usize] = du + 1;
                queue.push(v);
            }
        }
    }
    for &v in queue.iter() {
        dist[v as usize] = u32::MAX;
    }
    (ecc, sum)
}

pub fn path_stats<G: Adjacency + ?Sized>(g: &G, mode: PathMode) -> Result<PathStats, StatsError> {
    let comps = components(g);
    let Some(lcc) = comps.first() else {
        return Err(StatsError::EmptyGraph);
    };
    let n = lcc.len();
    let sources: Vec<u32> = match mode {
        PathMode::Sampled { sources, seed } if sources < n => {
            let mut pool = lcc.clone();
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            for i in 0..sources {
                let j = rng.random_range(i..n);
                pool.swap(i, j);
            }
            pool.truncate(sources);
            pool
        }
        _ => lcc.clone(),
    };
    let sampled = sources.len() < n;

    let mut dist = alloc::vec![u32::MAX; g.id_bound()];
    let mut queue = Vec::with_capacity(n);
    let (mut diameter, mut total) = (0u32, 0u64);
    for &s in &sources {
        let (ecc, sum) = bfs(g, s, &mut dist, &mut queue);
        diameter = diameter.max(ecc);
        total += sum;
    }
    let pairs = sources.len() as f64 * (n as f64 - 1.0);
    Ok(PathStats {
        diameter,
        diameter_is_lower_bound: sampled,
        avg_path_length: if pairs > 0.0 { total as f64 / pairs } else { 0.0 },
        sources: sources.len(),
        components: comps.len(),
        largest_component: n,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GraphStats {
    #[serde(flatten)]
    pub basic: BasicStats,
    #[serde(flatten)]
    pub paths: PathStats,
}

pub fn graph_stats(graph: &FrozenGraph, mode: PathMode) -> Result<GraphStats, StatsError> {
    Ok(GraphStats {
        basic: basic_stats(graph)?,
        paths: path_stats(graph, mode)?,
    })
}
