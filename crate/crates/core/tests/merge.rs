//! Merge invariants, plus equivalence with an exact pairwise union-find
//! written independently here.

mod common;

use std::collections::{BTreeMap, BTreeSet};

use kgbench_core::merge::{run_merge_schedule, EmbeddingTable, IndexBackend, IndexConfig, MergeConfig, MergeResolution};
use kgbench_core::{KnowledgeGraph, NodeId, NodeKind};
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

const DIM: usize = 12;

fn unit(v: &[f64]) -> Vec<f64> {
    let n = v.iter().map(|x| x * x).sum::<f64>().sqrt();
    v.iter().map(|x| x / n).collect()
}

/// Clustered vectors: near-duplicates inside a cluster, unrelated across.
fn clustered(rng: &mut ChaCha8Rng, n: usize, clusters: usize, noise: f64) -> Vec<Vec<f32>> {
    let centers: Vec<Vec<f64>> = (0..clusters)
        .map(|_| unit(&(0..DIM).map(|_| rng.random::<f64>() * 2.0 - 1.0).collect::<Vec<_>>()))
        .collect();
    (0..n)
        .map(|_| {
            let c = &centers[rng.random_range(0..clusters)];
            c.iter().map(|x| (x + noise * (rng.random::<f64>() * 2.0 - 1.0)) as f32).collect()
        })
        .collect()
}

/// One paper per key-information node, kinds assigned round robin.
fn fixture(kinds: &[NodeKind], n: usize) -> KnowledgeGraph {
    let ki: Vec<NodeKind> = (0..n).map(|j| kinds[j % kinds.len()]).collect();
    let edges: Vec<(usize, usize)> = (0..n).map(|j| (j, j)).collect();
    common::bipartite(n, &ki, &edges)
}

fn table(g: &KnowledgeGraph, vectors: &[Vec<f32>]) -> EmbeddingTable {
    g.keyinfo().iter().zip(vectors).map(|(id, v)| (*id, v.clone())).collect()
}

fn cosine(a: &[f32], b: &[f32]) -> f64 {
    let (a, b): (Vec<f64>, Vec<f64>) = (a.iter().map(|&x| x as f64).collect(), b.iter().map(|&x| x as f64).collect());
    let (a, b) = (unit(&a), unit(&b));
    a.iter().zip(&b).map(|(x, y)| x * y).sum()
}

/// Exact oracle: union every same-kind pair with cosine > theta.
fn oracle_partition(g: &KnowledgeGraph, t: &EmbeddingTable, theta: f64) -> BTreeSet<BTreeSet<NodeId>> {
    let ids: Vec<NodeId> = g.keyinfo().iter().copied().collect();
    let mut parent: Vec<usize> = (0..ids.len()).collect();
    fn root(p: &mut [usize], mut x: usize) -> usize {
        while p[x] != x {
            x = p[x];
        }
        x
    }
    for i in 0..ids.len() {
        for j in i + 1..ids.len() {
            let same_kind = g.node(ids[i]).unwrap().kind == g.node(ids[j]).unwrap().kind;
            if same_kind && cosine(&t[&ids[i]], &t[&ids[j]]) > theta {
                let (a, b) = (root(&mut parent, i), root(&mut parent, j));
                parent[a] = b;
            }
        }
    }
    let mut groups: BTreeMap<usize, BTreeSet<NodeId>> = BTreeMap::new();
    for (i, id) in ids.iter().enumerate() {
        groups.entry(root(&mut parent, i)).or_default().insert(*id);
    }
    groups.into_values().collect()
}

/// Closest same-kind pair similarity to theta; the oracle is only compared
/// where float rounding cannot flip a decision.
fn margin(g: &KnowledgeGraph, t: &EmbeddingTable, theta: f64) -> f64 {
    let ids: Vec<NodeId> = g.keyinfo().iter().copied().collect();
    let mut m = f64::INFINITY;
    for i in 0..ids.len() {
        for j in i + 1..ids.len() {
            if g.node(ids[i]).unwrap().kind == g.node(ids[j]).unwrap().kind {
                m = m.min((cosine(&t[&ids[i]], &t[&ids[j]]) - theta).abs());
            }
        }
    }
    m
}

fn partition(res: &MergeResolution) -> BTreeSet<BTreeSet<NodeId>> {
    let mut groups: BTreeMap<NodeId, BTreeSet<NodeId>> = BTreeMap::new();
    for (orig, canon) in &res.canonical {
        groups.entry(*canon).or_default().insert(*orig);
    }
    groups.into_values().collect()
}

pub fn exhaustive_index(population: usize) -> IndexConfig {
    IndexConfig {
        dimension: DIM,
        search_beam: population,
        neighbors_per_query: population,
        build_beam: population,
        backend: IndexBackend::Hnsw,
        ..Default::default()
    }
}

fn merge(g: &mut KnowledgeGraph, t: &EmbeddingTable, theta: f32, index: &IndexConfig) -> MergeResolution {
    run_merge_schedule(g, t, &MergeConfig::with_threshold(theta), index).unwrap().0
}

#[test]
fn hnsw_matches_exact_union_find_on_200_nodes() {
    let kinds = [NodeKind::Datasets, NodeKind::Metrics];
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let mut checked = 0;
    for round in 0..6 {
        let g0 = fixture(&kinds, 200);
        let t = table(&g0, &clustered(&mut rng, 200, 25, 0.12 + 0.02 * round as f64));
        for theta in [0.85f32, 0.90, 0.95] {
            if margin(&g0, &t, theta as f64) < 1e-5 {
                continue;
            }
            let mut g = g0.clone();
            let res = merge(&mut g, &t, theta, &exhaustive_index(200));
            assert_eq!(partition(&res), oracle_partition(&g0, &t, theta as f64), "round {round} theta {theta}");
            checked += 1;
        }
    }
    assert!(checked >= 12, "only {checked} fixtures had a safe margin");
}

fn arb_fixture() -> impl Strategy<Value = (usize, u64, f32)> {
    (4usize..40, any::<u64>(), prop_oneof![Just(0.8f32), Just(0.85), Just(0.9), Just(0.95)])
}

const KINDS: [NodeKind; 3] = [NodeKind::Datasets, NodeKind::Metrics, NodeKind::ClassificationTags];

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn merges_never_cross_kinds((n, seed, theta) in arb_fixture()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let g0 = fixture(&KINDS, n);
        // Identical vectors across kinds: only the partitioning keeps them apart.
        let t = table(&g0, &clustered(&mut rng, n, 2, 0.05));
        let mut g = g0.clone();
        let res = merge(&mut g, &t, theta, &IndexConfig { dimension: DIM, ..Default::default() });
        for (orig, canon) in &res.canonical {
            prop_assert_eq!(g0.node(*orig).unwrap().kind, g0.node(*canon).unwrap().kind);
        }
        for (canon, entries) in &res.provenance {
            let k = g.node(*canon).unwrap().kind;
            prop_assert!(entries.iter().all(|e| e.kind == k));
        }
    }

    #[test]
    fn conservation_and_edge_preservation((n, seed, theta) in arb_fixture()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let g0 = fixture(&KINDS, n);
        let t = table(&g0, &clustered(&mut rng, n, 3, 0.2));
        let mut g = g0.clone();
        let res = merge(&mut g, &t, theta, &exhaustive_index(n));
        g.check_invariants().unwrap();
        let entries: usize = res.provenance.values().map(|s| s.len()).sum();
        prop_assert_eq!(entries, g0.keyinfo().len());
        prop_assert_eq!(g.keyinfo().len(), res.provenance.len());
        for (a, b) in g0.edges() {
            let (a, b) = (res.canonical_of(a), res.canonical_of(b));
            prop_assert!(g.has_edge(a, b));
        }
        let expected: BTreeSet<(NodeId, NodeId)> = g0
            .edges()
            .map(|(a, b)| {
                let (a, b) = (res.canonical_of(a), res.canonical_of(b));
                (a.min(b), a.max(b))
            })
            .collect();
        prop_assert_eq!(g.num_edges(), expected.len());
    }

    #[test]
    fn raising_theta_never_adds_merges((n, seed, _t) in arb_fixture(), lo in 0.5f32..0.95, step in 0.0f32..0.2) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let g0 = fixture(&KINDS, n);
        let t = table(&g0, &clustered(&mut rng, n, 3, 0.25));
        let hi = (lo + step).min(1.0);
        let idx = exhaustive_index(n);
        let low = merge(&mut g0.clone(), &t, lo, &idx).merged_away();
        let high = merge(&mut g0.clone(), &t, hi, &idx).merged_away();
        prop_assert!(high <= low, "theta {lo} -> {low}, theta {hi} -> {high}");
    }

    #[test]
    fn small_inputs_match_the_oracle((n, seed, theta) in arb_fixture()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let g0 = fixture(&KINDS, n);
        let t = table(&g0, &clustered(&mut rng, n, 3, 0.2));
        prop_assume!(margin(&g0, &t, theta as f64) > 1e-5);
        let res = merge(&mut g0.clone(), &t, theta, &exhaustive_index(n));
        prop_assert_eq!(partition(&res), oracle_partition(&g0, &t, theta as f64));
    }
}

#[test]
fn second_pass_is_a_fixed_point() {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let g0 = fixture(&KINDS, 60);
    let t = table(&g0, &clustered(&mut rng, 60, 5, 0.1));
    let mut g = g0.clone();
    let first = merge(&mut g, &t, 0.9, &exhaustive_index(60));
    assert!(first.merged_away() > 0);
    // Canonicals keep their own vectors.
    let t2: EmbeddingTable = g.keyinfo().iter().map(|id| (*id, t[id].clone())).collect();
    let second = merge(&mut g, &t2, 0.9, &exhaustive_index(60));
    assert_eq!(second.merged_away(), 0);
}
