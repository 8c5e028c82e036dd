//! Semantic disambiguation: collapse same-kind key-information nodes whose
//! embeddings are more similar than a threshold.
//!
//! Vectors are indexed in one partition per [`NodeKind`], so neighbor
//! retrieval can never cross kinds. Each node's top-K same-kind neighbors above
//! the threshold are unioned; every component becomes one canonical node (the
//! smallest original id), with the graph rewired and provenance kept.

use alloc::boxed::Box;
use alloc::collections::{BTreeMap, BTreeSet};
use alloc::vec::Vec;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::graph::{GraphError, KnowledgeGraph, NodeId, PaperId};
use crate::hnsw::{FlatIndex, HnswIndex, HnswParams, VectorSearch};
use crate::kind::NodeKind;
use crate::vector::{dot, normalize};

pub const DEFAULT_THRESHOLD: f32 = 0.90;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum MergeError {
    #[error("vector for {id} has dimension {got}, expected {expected}")]
    DimensionMismatch { id: NodeId, expected: usize, got: usize },
    #[error("node {0} indexed twice")]
    DuplicateId(NodeId),
    #[error("node {0} is not indexed")]
    Unindexed(NodeId),
    #[error("kind `{0}` is not in the index")]
    KindNotIndexed(NodeKind),
    #[error("missing embeddings for kind `{kind}` ({missing} nodes)")]
    MissingEmbeddings { kind: NodeKind, missing: usize },
    #[error("invalid merge schedule: {0}")]
    InvalidSchedule(&'static str),
    #[error("threshold {0} outside [-1, 1]")]
    InvalidThreshold(f32),
    #[error(transparent)]
    Graph(#[from] GraphError),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum IndexBackend {
    Hnsw,
    /// Exact scan; used for tests and tiny partitions.
    Flat,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct IndexConfig {
    pub max_links_per_node: usize,
    pub build_beam: usize,
    pub search_beam: usize,
    pub neighbors_per_query: usize,
    pub dimension: usize,
    pub backend: IndexBackend,
    pub seed: u64,
}

impl Default for IndexConfig {
    fn default() -> Self {
        IndexConfig {
            max_links_per_node: 32,
            build_beam: 50,
            search_beam: 30,
            neighbors_per_query: 20,
            dimension: 4096,
            backend: IndexBackend::Hnsw,
            seed: 0x5eed,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Similarity {
    /// Inner product of unit-normalised vectors.
    Cosine,
    InnerProduct,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MergeConfig {
    pub threshold: f32,
    pub per_kind_threshold: BTreeMap<NodeKind, f32>,
    pub schedule: Vec<NodeKind>,
    pub similarity: Similarity,
    /// Weight of the fixed per-kind offset added to content vectors before
    /// indexing. 0 disables it; partitions are by kind regardless.
    pub type_offset_scale: f32,
}

impl Default for MergeConfig {
    fn default() -> Self {
        MergeConfig {
            threshold: DEFAULT_THRESHOLD,
            per_kind_threshold: BTreeMap::new(),
            schedule: default_schedule(),
            similarity: Similarity::Cosine,
            type_offset_scale: 0.0,
        }
    }
}

/// Coarse to fine: short, frequent kinds first; rich visual and symbolic
/// kinds last.
pub fn default_schedule() -> Vec<NodeKind> {
    use NodeKind::*;
    alloc::vec![
        ClassificationTags,
        Datasets,
        Metrics,
        ResearchBackground,
        KeyContributions,
        Methodology,
        Results,
        Limitations,
        Tables,
        Figures,
        Algorithms,
        Formulas,
    ]
}

impl MergeConfig {
    pub fn with_threshold(threshold: f32) -> Self {
        MergeConfig {
            threshold,
            ..Default::default()
        }
    }

    pub fn with_schedule(mut self, schedule: Vec<NodeKind>) -> Self {
        self.schedule = schedule;
        self
    }

    pub fn threshold_for(&self, kind: NodeKind) -> f32 {
        self.per_kind_threshold.get(&kind).copied().unwrap_or(self.threshold)
    }

    pub fn validate(&self) -> Result<(), MergeError> {
        let mut seen = BTreeSet::new();
        for k in &self.schedule {
            if !k.is_key_info() {
                return Err(MergeError::InvalidSchedule("title is not mergeable"));
            }
            if !seen.insert(*k) {
                return Err(MergeError::InvalidSchedule("kind listed twice"));
            }
        }
        let all = core::iter::once(self.threshold).chain(self.per_kind_threshold.values().copied());
        for t in all {
            if !(-1.0..=1.0).contains(&t) {
                return Err(MergeError::InvalidThreshold(t));
            }
        }
        Ok(())
    }

    /// Turns a content embedding into the vector that gets indexed.
    pub fn prepare(&self, kind: NodeKind, content: &[f32]) -> Vec<f32> {
        let mut v = content.to_vec();
        if self.similarity == Similarity::Cosine {
            normalize(&mut v);
        }
        if self.type_offset_scale != 0.0 {
            for (x, o) in v.iter_mut().zip(type_offset(kind, content.len())) {
                *x += self.type_offset_scale * o;
            }
            if self.similarity == Similarity::Cosine {
                normalize(&mut v);
            }
        }
        v
    }
}

/// Fixed pseudo-random unit vector per kind.
pub fn type_offset(kind: NodeKind, dim: usize) -> Vec<f32> {
    let mut rng = ChaCha8Rng::seed_from_u64(0x7e9e_0000 + kind.index() as u64);
    let mut v: Vec<f32> = (0..dim).map(|_| rng.random::<f32>() * 2.0 - 1.0).collect();
    normalize(&mut v);
    v
}

#[derive(Debug, Clone)]
enum Ann {
    Hnsw(Box<HnswIndex>),
    Flat(FlatIndex),
}

#[derive(Debug, Clone)]
struct Partition {
    ids: Vec<NodeId>,
    ann: Ann,
}

impl Partition {
    fn vector(&self, idx: usize) -> &[f32] {
        match &self.ann {
            Ann::Hnsw(h) => h.vector(idx),
            Ann::Flat(f) => f.vector(idx),
        }
    }

    fn search(&self, q: &[f32], k: usize, beam: usize) -> Vec<(usize, f32)> {
        match &self.ann {
            Ann::Hnsw(h) => h.search_with_beam(q, k, beam),
            Ann::Flat(f) => f.search(q, k),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct IndexEntry {
    pub id: NodeId,
    pub kind: NodeKind,
    pub vector: Vec<f32>,
}

/// Kind-partitioned nearest-neighbor index over key-information nodes.
#[derive(Debug, Clone)]
pub struct VectorIndex {
    cfg: IndexConfig,
    partitions: BTreeMap<NodeKind, Partition>,
    lookup: BTreeMap<NodeId, (NodeKind, usize)>,
}

pub fn build_vector_index(entries: &[IndexEntry], cfg: &IndexConfig) -> Result<VectorIndex, MergeError> {
    let mut lookup = BTreeMap::new();
    let mut partitions: BTreeMap<NodeKind, Partition> = BTreeMap::new();
    for e in entries {
        if e.vector.len() != cfg.dimension {
            return Err(MergeError::DimensionMismatch {
                id: e.id,
                expected: cfg.dimension,
                got: e.vector.len(),
            });
        }
        let part = partitions.entry(e.kind).or_insert_with(|| Partition {
            ids: Vec::new(),
            ann: match cfg.backend {
                IndexBackend::Hnsw => Ann::Hnsw(Box::new(HnswIndex::new(
                    cfg.dimension,
                    HnswParams {
                        max_links: cfg.max_links_per_node,
                        ef_construction: cfg.build_beam,
                        ef_search: cfg.search_beam,
                        seed: cfg.seed ^ e.kind.index() as u64,
                    },
                ))),
                IndexBackend::Flat => Ann::Flat(FlatIndex::new(cfg.dimension)),
            },
        });
        if lookup.insert(e.id, (e.kind, part.ids.len())).is_some() {
            return Err(MergeError::DuplicateId(e.id));
        }
        part.ids.push(e.id);
        match &mut part.ann {
            Ann::Hnsw(h) => h.add(&e.vector),
            Ann::Flat(f) => f.add(&e.vector),
        };
    }
    Ok(VectorIndex {
        cfg: *cfg,
        partitions,
        lookup,
    })
}

impl VectorIndex {
    pub fn config(&self) -> &IndexConfig {
        &self.cfg
    }

    pub fn len(&self) -> usize {
        self.lookup.len()
    }

    pub fn is_empty(&self) -> bool {
        self.lookup.is_empty()
    }

    pub fn kinds(&self) -> impl Iterator<Item = NodeKind> + '_ {
        self.partitions.keys().copied()
    }

    pub fn ids_of(&self, kind: NodeKind) -> &[NodeId] {
        self.partitions.get(&kind).map_or(&[], |p| &p.ids)
    }

    pub fn kind_of(&self, id: NodeId) -> Option<NodeKind> {
        self.lookup.get(&id).map(|(k, _)| *k)
    }

    pub fn vector_of(&self, id: NodeId) -> Option<&[f32]> {
        let (kind, idx) = self.lookup.get(&id)?;
        Some(self.partitions[kind].vector(*idx))
    }

    /// Nearest same-kind neighbors of an indexed node, self excluded, best
    /// first.
    pub fn topk_same_type(&self, node: NodeId, k: usize) -> Result<Vec<(NodeId, f32)>, MergeError> {
        let (kind, idx) = *self.lookup.get(&node).ok_or(MergeError::Unindexed(node))?;
        let part = &self.partitions[&kind];
        let beam = self.cfg.search_beam.max(k + 1);
        let hits = part.search(part.vector(idx), k + 1, beam);
        Ok(hits
            .into_iter()
            .filter(|(i, _)| *i != idx)
            .take(k)
            .map(|(i, s)| (part.ids[i], s))
            .collect())
    }

    /// Exact similarities between two indexed nodes.
    pub fn similarity(&self, a: NodeId, b: NodeId) -> Option<f32> {
        Some(dot(self.vector_of(a)?, self.vector_of(b)?))
    }
}

/// Union-find with union by size; each root remembers its component's
/// smallest member so canonicals do not depend on processing order.
#[derive(Debug, Clone)]
pub struct UnionFind {
    parent: Vec<u32>,
    size: Vec<u32>,
    min_member: Vec<u32>,
}

impl UnionFind {
    pub fn new(n: usize) -> Self {
        UnionFind {
            parent: (0..n as u32).collect(),
            size: alloc::vec![1; n],
            min_member: (0..n as u32).collect(),
        }
    }

    pub fn find(&mut self, mut x: u32) -> u32 {
        while self.parent[x as usize] != x {
            let p = self.parent[x as usize];
            self.parent[x as usize] = self.parent[p as usize];
            x = p;
        }
        x
    }

    pub fn union(&mut self, a: u32, b: u32) -> bool {
        let (mut ra, mut rb) = (self.find(a), self.find(b));
        if ra == rb {
            return false;
        }
        if self.size[ra as usize] < self.size[rb as usize] {
            core::mem::swap(&mut ra, &mut rb);
        }
        self.parent[rb as usize] = ra;
        self.size[ra as usize] += self.size[rb as usize];
        let m = self.min_member[rb as usize].min(self.min_member[ra as usize]);
        self.min_member[ra as usize] = m;
        true
    }

    /// Smallest member of `x`'s component.
    pub fn representative(&mut self, x: u32) -> u32 {
        let r = self.find(x);
        self.min_member[r as usize]
    }
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
pub struct ProvenanceEntry {
    pub original: NodeId,
    pub paper_id: PaperId,
    pub kind: NodeKind,
}

/// Mapping from original key-information ids to canonical ids, with the
/// originals behind every canonical.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct MergeResolution {
    pub canonical: BTreeMap<NodeId, NodeId>,
    pub provenance: BTreeMap<NodeId, BTreeSet<ProvenanceEntry>>,
}

impl MergeResolution {
    /// Every key-information node maps to itself.
    pub fn identity(graph: &KnowledgeGraph) -> Self {
        let mut res = MergeResolution::default();
        for id in graph.keyinfo() {
            let node = graph.node(*id).expect("partition member exists");
            res.canonical.insert(*id, *id);
            res.provenance.insert(
                *id,
                BTreeSet::from([ProvenanceEntry {
                    original: *id,
                    paper_id: node.origin.paper_id.clone(),
                    kind: node.kind,
                }]),
            );
        }
        res
    }

    pub fn canonical_of(&self, id: NodeId) -> NodeId {
        self.canonical.get(&id).copied().unwrap_or(id)
    }

    /// Number of originals folded into another node.
    pub fn merged_away(&self) -> usize {
        self.canonical.iter().filter(|(a, b)| a != b).count()
    }

    /// Applies `later` (expressed over this resolution's canonicals) on top of
    /// `self`.
    pub fn compose(&self, later: &MergeResolution) -> MergeResolution {
        let mut out = MergeResolution::default();
        for (orig, mid) in &self.canonical {
            out.canonical.insert(*orig, later.canonical_of(*mid));
        }
        for (orig, fin) in &later.canonical {
            out.canonical.entry(*orig).or_insert(*fin);
        }
        for (canon, entries) in &self.provenance {
            let fin = later.canonical_of(*canon);
            out.provenance.entry(fin).or_default().extend(entries.iter().cloned());
        }
        for (canon, entries) in &later.provenance {
            // Entries for ids the earlier resolution already knew are covered
            // by its richer provenance.
            let fresh = entries.iter().filter(|e| !self.canonical.contains_key(&e.original)).cloned();
            out.provenance.entry(*canon).or_default().extend(fresh);
        }
        out.provenance.retain(|_, v| !v.is_empty());
        out
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct KindMergeStats {
    pub kind: NodeKind,
    pub threshold: f32,
    pub nodes_before: usize,
    pub nodes_after: usize,
    pub merged_away: usize,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct MergeReport {
    pub similarity: Option<Similarity>,
    pub per_kind: Vec<KindMergeStats>,
}

impl MergeReport {
    pub fn total_merged(&self) -> usize {
        self.per_kind.iter().map(|k| k.merged_away).sum()
    }
}

/// Merges the nodes of `kind` that `index` knows about. Returns the delta
/// resolution for that kind (singletons included).
pub fn merge_pass(
    graph: &mut KnowledgeGraph,
    index: &VectorIndex,
    kind: NodeKind,
    cfg: &MergeConfig,
) -> Result<MergeResolution, MergeError> {
    let part = index.partitions.get(&kind).ok_or(MergeError::KindNotIndexed(kind))?;
    let threshold = cfg.threshold_for(kind);
    let k = index.cfg.neighbors_per_query;
    let ids = &part.ids;
    let pos: BTreeMap<NodeId, u32> = ids.iter().enumerate().map(|(i, id)| (*id, i as u32)).collect();

    let mut uf = UnionFind::new(ids.len());
    for (i, id) in ids.iter().enumerate() {
        for (other, sim) in index.topk_same_type(*id, k)? {
            if sim > threshold {
                uf.union(i as u32, pos[&other]);
            }
        }
    }

    // Canonical is the smallest NodeId in the component; ids are in insertion
    // order, so map the representative index through `ids` after sorting.
    let mut components: BTreeMap<u32, Vec<u32>> = BTreeMap::new();
    for i in 0..ids.len() as u32 {
        let r = uf.find(i);
        components.entry(r).or_default().push(i);
    }

    let mut delta = MergeResolution::default();
    for members in components.values() {
        let canon = members.iter().map(|&i| ids[i as usize]).min().expect("non-empty component");
        let mut prov = BTreeSet::new();
        for &i in members {
            let id = ids[i as usize];
            let node = graph.node(id).ok_or(GraphError::UnknownNode(id))?;
            if node.kind != kind {
                return Err(GraphError::KindMismatch(id, node.kind, canon, kind).into());
            }
            prov.insert(ProvenanceEntry {
                original: id,
                paper_id: node.origin.paper_id.clone(),
                kind,
            });
            delta.canonical.insert(id, canon);
        }
        for &i in members {
            let id = ids[i as usize];
            if id != canon {
                graph.absorb(canon, id)?;
            }
        }
        delta.provenance.insert(canon, prov);
    }
    Ok(delta)
}

/// Resolved content embeddings per node.
pub type EmbeddingTable = BTreeMap<NodeId, Vec<f32>>;

/// Sidecar address of an embedding.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
pub struct EmbeddingKey {
    pub paper_id: PaperId,
    pub kind: NodeKind,
    pub ordinal: u16,
}

/// Maps sidecar keys onto the graph's current key-information nodes.
pub fn resolve_embeddings(graph: &KnowledgeGraph, by_key: &BTreeMap<EmbeddingKey, Vec<f32>>) -> EmbeddingTable {
    let mut table = EmbeddingTable::new();
    for id in graph.keyinfo() {
        let node = graph.node(*id).expect("partition member exists");
        let key = EmbeddingKey {
            paper_id: node.origin.paper_id.clone(),
            kind: node.kind,
            ordinal: node.origin.ordinal,
        };
        if let Some(v) = by_key.get(&key) {
            table.insert(*id, v.clone());
        }
    }
    table
}

/// Runs [`merge_pass`] for every kind in the schedule, in order.
pub fn run_merge_schedule(
    graph: &mut KnowledgeGraph,
    embeddings: &EmbeddingTable,
    cfg: &MergeConfig,
    index_cfg: &IndexConfig,
) -> Result<(MergeResolution, MergeReport), MergeError> {
    cfg.validate()?;
    let mut resolution = MergeResolution::identity(graph);
    let mut report = MergeReport {
        similarity: Some(cfg.similarity),
        per_kind: Vec::new(),
    };
    for &kind in &cfg.schedule {
        let members: Vec<NodeId> = graph
            .keyinfo()
            .iter()
            .copied()
            .filter(|id| graph.node(*id).is_some_and(|n| n.kind == kind))
            .collect();
        let missing = members.iter().filter(|id| !embeddings.contains_key(id)).count();
        if missing > 0 {
            return Err(MergeError::MissingEmbeddings { kind, missing });
        }
        let threshold = cfg.threshold_for(kind);
        if members.is_empty() {
            report.per_kind.push(KindMergeStats {
                kind,
                threshold,
                nodes_before: 0,
                nodes_after: 0,
                merged_away: 0,
            });
            continue;
        }
        let entries: Vec<IndexEntry> = members
            .iter()
            .map(|id| IndexEntry {
                id: *id,
                kind,
                vector: cfg.prepare(kind, &embeddings[id]),
            })
            .collect();
        let index = build_vector_index(&entries, index_cfg)?;
        let delta = merge_pass(graph, &index, kind, cfg)?;
        let merged_away = delta.merged_away();
        report.per_kind.push(KindMergeStats {
            kind,
            threshold,
            nodes_before: members.len(),
            nodes_after: members.len() - merged_away,
            merged_away,
        });
        resolution = resolution.compose(&delta);
    }
    Ok((resolution, report))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::record::NodeRecord;

    fn cfg(dim: usize) -> IndexConfig {
        IndexConfig {
            dimension: dim,
            ..Default::default()
        }
    }

    fn two_dataset_graph() -> (KnowledgeGraph, NodeId, NodeId) {
        let mut g = KnowledgeGraph::new();
        let a = g.add_paper_subgraph(&NodeRecord::new("a", "A").with_field(NodeKind::Datasets, "ImageNet")).unwrap();
        let b = g.add_paper_subgraph(&NodeRecord::new("b", "B").with_field(NodeKind::Datasets, "ImageNet-1k")).unwrap();
        let da = g.neighbors(a).unwrap()[0];
        let db = g.neighbors(b).unwrap()[0];
        (g, da, db)
    }

    /// Two unit vectors with cosine exactly `c`.
    fn pair_with_cosine(c: f32) -> (Vec<f32>, Vec<f32>) {
        let s = libm::sqrtf(1.0 - c * c);
        (alloc::vec![1.0, 0.0], alloc::vec![c, s])
    }

    #[test]
    fn type_restriction_excludes_other_kinds() {
        let entries = [
            IndexEntry { id: NodeId(0), kind: NodeKind::Datasets, vector: alloc::vec![1.0, 0.0] },
            IndexEntry { id: NodeId(1), kind: NodeKind::Figures, vector: alloc::vec![1.0, 0.0] },
            IndexEntry { id: NodeId(2), kind: NodeKind::Figures, vector: alloc::vec![0.9, 0.1] },
        ];
        let idx = build_vector_index(&entries, &cfg(2)).unwrap();
        assert!(idx.topk_same_type(NodeId(0), 20).unwrap().is_empty());
        assert_eq!(idx.topk_same_type(NodeId(1), 20).unwrap().len(), 1);
    }

    #[test]
    fn identical_vectors_find_each_other() {
        let entries = [
            IndexEntry { id: NodeId(4), kind: NodeKind::Datasets, vector: alloc::vec![0.6, 0.8] },
            IndexEntry { id: NodeId(9), kind: NodeKind::Datasets, vector: alloc::vec![0.6, 0.8] },
        ];
        let idx = build_vector_index(&entries, &cfg(2)).unwrap();
        let hits = idx.topk_same_type(NodeId(4), 5).unwrap();
        assert_eq!(hits[0].0, NodeId(9));
        assert!((hits[0].1 - 1.0).abs() < 1e-6);
    }

    #[test]
    fn build_errors() {
        let bad = [IndexEntry { id: NodeId(0), kind: NodeKind::Datasets, vector: alloc::vec![1.0] }];
        assert!(matches!(build_vector_index(&bad, &cfg(2)), Err(MergeError::DimensionMismatch { .. })));
        let dup = [
            IndexEntry { id: NodeId(0), kind: NodeKind::Datasets, vector: alloc::vec![1.0, 0.0] },
            IndexEntry { id: NodeId(0), kind: NodeKind::Metrics, vector: alloc::vec![1.0, 0.0] },
        ];
        assert_eq!(build_vector_index(&dup, &cfg(2)).unwrap_err(), MergeError::DuplicateId(NodeId(0)));
        let idx = build_vector_index(&[], &cfg(2)).unwrap();
        assert_eq!(idx.topk_same_type(NodeId(3), 1).unwrap_err(), MergeError::Unindexed(NodeId(3)));
    }

    #[test]
    fn pair_above_threshold_merges() {
        let (mut g, da, db) = two_dataset_graph();
        let (va, vb) = pair_with_cosine(0.99);
        let idx = build_vector_index(
            &[
                IndexEntry { id: da, kind: NodeKind::Datasets, vector: va },
                IndexEntry { id: db, kind: NodeKind::Datasets, vector: vb },
            ],
            &cfg(2),
        )
        .unwrap();
        let res = merge_pass(&mut g, &idx, NodeKind::Datasets, &MergeConfig::with_threshold(0.9)).unwrap();
        assert_eq!(res.canonical_of(db), da);
        assert_eq!(res.provenance[&da].len(), 2);
        assert_eq!(g.degree(da), 2);
        assert_eq!(g.node(da).unwrap().source_paper_ids.len(), 2);
        g.check_invariants().unwrap();
    }

    #[test]
    fn pair_below_threshold_stays() {
        let (mut g, da, db) = two_dataset_graph();
        let (va, vb) = pair_with_cosine(0.99);
        let idx = build_vector_index(
            &[
                IndexEntry { id: da, kind: NodeKind::Datasets, vector: va },
                IndexEntry { id: db, kind: NodeKind::Datasets, vector: vb },
            ],
            &cfg(2),
        )
        .unwrap();
        let res = merge_pass(&mut g, &idx, NodeKind::Datasets, &MergeConfig::with_threshold(0.995)).unwrap();
        assert_eq!(res.merged_away(), 0);
        assert_eq!(g.keyinfo().len(), 2);
    }

    #[test]
    fn pass_on_unindexed_kind_fails() {
        let (mut g, _, _) = two_dataset_graph();
        let idx = build_vector_index(&[], &cfg(2)).unwrap();
        assert_eq!(
            merge_pass(&mut g, &idx, NodeKind::Metrics, &MergeConfig::default()).unwrap_err(),
            MergeError::KindNotIndexed(NodeKind::Metrics)
        );
    }

    #[test]
    fn schedule_validation() {
        let c = MergeConfig::default().with_schedule(alloc::vec![NodeKind::Datasets, NodeKind::Datasets]);
        assert!(matches!(c.validate(), Err(MergeError::InvalidSchedule(_))));
        let c = MergeConfig::default().with_schedule(alloc::vec![NodeKind::Title]);
        assert!(matches!(c.validate(), Err(MergeError::InvalidSchedule(_))));
        assert!(MergeConfig::default().validate().is_ok());
    }

    #[test]
    fn empty_schedule_is_identity() {
        let (mut g, da, db) = two_dataset_graph();
        let before = g.clone();
        let (res, report) =
            run_merge_schedule(&mut g, &EmbeddingTable::new(), &MergeConfig::default().with_schedule(Vec::new()), &cfg(2))
                .unwrap();
        assert_eq!(res, MergeResolution::identity(&before));
        assert_eq!(res.canonical_of(db), db);
        assert_eq!(res.canonical_of(da), da);
        assert!(report.per_kind.is_empty());
        assert_eq!(g, before);
    }

    #[test]
    fn missing_embeddings_name_the_kind() {
        let (mut g, da, _) = two_dataset_graph();
        let mut table = EmbeddingTable::new();
        table.insert(da, alloc::vec![1.0, 0.0]);
        let err = run_merge_schedule(&mut g, &table, &MergeConfig::default(), &cfg(2)).unwrap_err();
        assert_eq!(err, MergeError::MissingEmbeddings { kind: NodeKind::Datasets, missing: 1 });
    }

    #[test]
    fn canonical_is_smallest_member() {
        let mut uf = UnionFind::new(6);
        uf.union(5, 3);
        uf.union(4, 5);
        uf.union(3, 1);
        for x in [1, 3, 4, 5] {
            assert_eq!(uf.representative(x), 1);
        }
        assert_eq!(uf.representative(2), 2);
    }
}
