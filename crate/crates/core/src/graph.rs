//! Heterogeneous paper / key-information graph.
//!
//! [`KnowledgeGraph`] is the mutable store used while building and merging.
//! Edges are undirected; a title node links to each of its key-information
//! nodes ("belongs-to"), and merging rewires edges onto canonical nodes so
//! that papers become connected through shared key information.
//!
//! [`FrozenGraph`] is the immutable CSR view used by walks and statistics.

use alloc::borrow::ToOwned;
use alloc::collections::{BTreeMap, BTreeSet};
use alloc::string::{String, ToString};
use alloc::vec::Vec;
use core::fmt;

use serde::{Deserialize, Serialize};

use crate::kind::{Modality, NodeKind};
use crate::record::NodeRecord;

/// Surrogate node key. Never reused, independent of content.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct NodeId(pub u32);

impl NodeId {
    pub fn index(self) -> usize {
        self.0 as usize
    }
}

impl fmt::Display for NodeId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "n{}", self.0)
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct PaperId(String);

impl PaperId {
    pub fn as_str(&self) -> &str {
        &self.0
    }
}

impl From<&str> for PaperId {
    fn from(s: &str) -> Self {
        PaperId(s.to_owned())
    }
}

impl From<String> for PaperId {
    fn from(s: String) -> Self {
        PaperId(s)
    }
}

impl fmt::Display for PaperId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

/// Where a node came from before any merge: its paper and its position among
/// that paper's nodes of the same kind. Used to resolve sidecar embeddings.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct NodeOrigin {
    pub paper_id: PaperId,
    pub ordinal: u16,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Node {
    pub id: NodeId,
    pub kind: NodeKind,
    pub content: String,
    pub modality: Modality,
    /// Path of the media file for figure/table/formula/algorithm attachments.
    pub media: Option<String>,
    pub origin: NodeOrigin,
    /// Papers this node belongs to. One entry until merged.
    pub source_paper_ids: BTreeSet<PaperId>,
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum GraphError {
    #[error("paper `{0}` is already in the graph")]
    DuplicatePaper(PaperId),
    #[error("record for paper `{0}` has no title")]
    MissingTitle(PaperId),
    #[error("unknown node {0}")]
    UnknownNode(NodeId),
    #[error("self-loop on {0}")]
    SelfLoop(NodeId),
    #[error("{0} is not a key-information node")]
    NotKeyInfo(NodeId),
    #[error("cannot merge {0} ({1}) into {2} ({3})")]
    KindMismatch(NodeId, NodeKind, NodeId, NodeKind),
    #[error("graph invariant violated: {0}")]
    Invariant(String),
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct KnowledgeGraph {
    /// Indexed by `NodeId`; `None` marks a node absorbed by a merge.
    nodes: Vec<Option<Node>>,
    edges: BTreeSet<(NodeId, NodeId)>,
    articles: BTreeSet<NodeId>,
    keyinfo: BTreeSet<NodeId>,
    high_frequency: BTreeSet<NodeId>,
    adjacency: Vec<Vec<NodeId>>,
    papers: BTreeMap<PaperId, NodeId>,
}

/// Flat, order-stable representation used for persistence.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct GraphParts {
    pub next_id: u32,
    pub nodes: Vec<Node>,
    pub edges: Vec<(NodeId, NodeId)>,
    pub high_frequency: Vec<NodeId>,
}

fn edge_key(a: NodeId, b: NodeId) -> (NodeId, NodeId) {
    if a < b {
        (a, b)
    } else {
        (b, a)
    }
}

impl KnowledgeGraph {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn num_nodes(&self) -> usize {
        self.articles.len() + self.keyinfo.len()
    }

    pub fn num_edges(&self) -> usize {
        self.edges.len()
    }

    /// Exclusive upper bound on node ids ever allocated.
    pub fn id_bound(&self) -> usize {
        self.nodes.len()
    }

    pub fn node(&self, id: NodeId) -> Option<&Node> {
        self.nodes.get(id.index()).and_then(|n| n.as_ref())
    }

    pub fn contains(&self, id: NodeId) -> bool {
        self.node(id).is_some()
    }

    pub fn nodes(&self) -> impl Iterator<Item = &Node> {
        self.nodes.iter().flatten()
    }

    pub fn edges(&self) -> impl Iterator<Item = (NodeId, NodeId)> + '_ {
        self.edges.iter().copied()
    }

    pub fn has_edge(&self, a: NodeId, b: NodeId) -> bool {
        self.edges.contains(&edge_key(a, b))
    }

    /// Title nodes (V_a).
    pub fn articles(&self) -> &BTreeSet<NodeId> {
        &self.articles
    }

    /// Key-information nodes (V_e).
    pub fn keyinfo(&self) -> &BTreeSet<NodeId> {
        &self.keyinfo
    }

    /// High-frequency key-information nodes (V_h).
    pub fn high_frequency(&self) -> &BTreeSet<NodeId> {
        &self.high_frequency
    }

    pub fn paper_node(&self, paper: &PaperId) -> Option<NodeId> {
        self.papers.get(paper).copied()
    }

    pub fn papers(&self) -> impl Iterator<Item = (&PaperId, NodeId)> {
        self.papers.iter().map(|(p, id)| (p, *id))
    }

    /// Cached, sorted neighbor list.
    pub fn neighbors(&self, id: NodeId) -> Result<&[NodeId], GraphError> {
        if !self.contains(id) {
            return Err(GraphError::UnknownNode(id));
        }
        Ok(&self.adjacency[id.index()])
    }

    pub fn degree(&self, id: NodeId) -> usize {
        self.adjacency.get(id.index()).map_or(0, |a| a.len())
    }

    fn alloc_node(
        &mut self,
        kind: NodeKind,
        content: &str,
        media: Option<&str>,
        origin: NodeOrigin,
    ) -> NodeId {
        let id = NodeId(self.nodes.len() as u32);
        let mut sources = BTreeSet::new();
        sources.insert(origin.paper_id.clone());
        self.nodes.push(Some(Node {
            id,
            kind,
            content: content.to_string(),
            modality: kind.modality(),
            media: media.map(str::to_string),
            origin,
            source_paper_ids: sources,
        }));
        self.adjacency.push(Vec::new());
        if kind == NodeKind::Title {
            self.articles.insert(id);
        } else {
            self.keyinfo.insert(id);
        }
        id
    }

    /// Adds a title node plus one node per populated key-information payload,
    /// each linked to the title. Returns the title node id.
    pub fn add_paper_subgraph(&mut self, record: &NodeRecord) -> Result<NodeId, GraphError> {
        if self.papers.contains_key(&record.paper_id) {
            return Err(GraphError::DuplicatePaper(record.paper_id.clone()));
        }
        if record.title.trim().is_empty() {
            return Err(GraphError::MissingTitle(record.paper_id.clone()));
        }
        let title = self.alloc_node(
            NodeKind::Title,
            &record.title,
            None,
            NodeOrigin {
                paper_id: record.paper_id.clone(),
                ordinal: 0,
            },
        );
        self.papers.insert(record.paper_id.clone(), title);
        for pending in record.pending_nodes() {
            let id = self.alloc_node(
                pending.kind,
                pending.content,
                pending.media,
                NodeOrigin {
                    paper_id: record.paper_id.clone(),
                    ordinal: pending.ordinal,
                },
            );
            self.add_edge(title, id)?;
        }
        Ok(title)
    }

    /// Inserts an undirected edge. Returns `false` if it already existed.
    pub fn add_edge(&mut self, a: NodeId, b: NodeId) -> Result<bool, GraphError> {
        if a == b {
            return Err(GraphError::SelfLoop(a));
        }
        for id in [a, b] {
            if !self.contains(id) {
                return Err(GraphError::UnknownNode(id));
            }
        }
        if !self.edges.insert(edge_key(a, b)) {
            return Ok(false);
        }
        insert_sorted(&mut self.adjacency[a.index()], b);
        insert_sorted(&mut self.adjacency[b.index()], a);
        Ok(true)
    }

    /// Replaces V_h. Every member must be a key-information node.
    pub fn set_high_frequency(&mut self, set: BTreeSet<NodeId>) -> Result<(), GraphError> {
        if let Some(bad) = set.iter().find(|id| !self.keyinfo.contains(id)) {
            return Err(GraphError::NotKeyInfo(*bad));
        }
        self.high_frequency = set;
        Ok(())
    }

    /// Folds `absorbed` into `canonical`: edges are rewired (self-loops and
    /// duplicates dropped), provenance is unioned, and `absorbed` leaves
    /// V_e and V_h.
    pub fn absorb(&mut self, canonical: NodeId, absorbed: NodeId) -> Result<(), GraphError> {
        if canonical == absorbed {
            return Ok(());
        }
        let (ck, ak) = match (self.node(canonical), self.node(absorbed)) {
            (Some(c), Some(a)) => (c.kind, a.kind),
            (None, _) => return Err(GraphError::UnknownNode(canonical)),
            (_, None) => return Err(GraphError::UnknownNode(absorbed)),
        };
        if ck != ak {
            return Err(GraphError::KindMismatch(absorbed, ak, canonical, ck));
        }
        if !ck.is_key_info() {
            return Err(GraphError::NotKeyInfo(absorbed));
        }

        let moved = core::mem::take(&mut self.adjacency[absorbed.index()]);
        for n in moved {
            self.edges.remove(&edge_key(absorbed, n));
            let list = &mut self.adjacency[n.index()];
            if let Ok(pos) = list.binary_search(&absorbed) {
                list.remove(pos);
            }
            if n != canonical {
                self.add_edge(canonical, n)?;
            }
        }

        let gone = self.nodes[absorbed.index()].take().expect("checked above");
        if let Some(c) = self.nodes[canonical.index()].as_mut() {
            c.source_paper_ids.extend(gone.source_paper_ids);
        }
        self.keyinfo.remove(&absorbed);
        self.high_frequency.remove(&absorbed);
        Ok(())
    }

    /// Verifies partitions, edge endpoints and adjacency-cache coherence by
    /// rebuilding the cache from the edge set.
    pub fn check_invariants(&self) -> Result<(), GraphError> {
        let fail = |msg: &str| Err(GraphError::Invariant(msg.to_string()));
        let mut rebuilt: Vec<Vec<NodeId>> = alloc::vec![Vec::new(); self.nodes.len()];
        for &(a, b) in &self.edges {
            if !self.contains(a) || !self.contains(b) {
                return fail("edge endpoint missing");
            }
            rebuilt[a.index()].push(b);
            rebuilt[b.index()].push(a);
        }
        for list in &mut rebuilt {
            list.sort_unstable();
        }
        if rebuilt != self.adjacency {
            return fail("adjacency cache out of sync with edges");
        }
        for node in self.nodes() {
            let in_a = self.articles.contains(&node.id);
            let in_e = self.keyinfo.contains(&node.id);
            if in_a == in_e {
                return fail("node not in exactly one of V_a, V_e");
            }
            if in_a != (node.kind == NodeKind::Title) {
                return fail("partition disagrees with node kind");
            }
            if node.source_paper_ids.is_empty() {
                return fail("node without provenance");
            }
        }
        if self.articles.len() + self.keyinfo.len() != self.nodes().count() {
            return fail("partition contains absorbed ids");
        }
        if !self.high_frequency.is_subset(&self.keyinfo) {
            return fail("V_h not a subset of V_e");
        }
        Ok(())
    }

    pub fn to_parts(&self) -> GraphParts {
        GraphParts {
            next_id: self.nodes.len() as u32,
            nodes: self.nodes().cloned().collect(),
            edges: self.edges.iter().copied().collect(),
            high_frequency: self.high_frequency.iter().copied().collect(),
        }
    }

    pub fn from_parts(parts: GraphParts) -> Result<Self, GraphError> {
        let mut g = KnowledgeGraph {
            nodes: alloc::vec![None; parts.next_id as usize],
            adjacency: alloc::vec![Vec::new(); parts.next_id as usize],
            ..Default::default()
        };
        for node in parts.nodes {
            let idx = node.id.index();
            if idx >= g.nodes.len() || g.nodes[idx].is_some() {
                return Err(GraphError::Invariant("node id out of range or repeated".into()));
            }
            if node.kind == NodeKind::Title {
                if g.papers.insert(node.origin.paper_id.clone(), node.id).is_some() {
                    return Err(GraphError::DuplicatePaper(node.origin.paper_id));
                }
                g.articles.insert(node.id);
            } else {
                g.keyinfo.insert(node.id);
            }
            g.nodes[idx] = Some(node);
        }
        for (a, b) in parts.edges {
            g.add_edge(a, b)?;
        }
        g.set_high_frequency(parts.high_frequency.into_iter().collect())?;
        Ok(g)
    }

    /// Immutable CSR view for walks and statistics.
    pub fn freeze(&self) -> FrozenGraph {
        FrozenGraph::build(self)
    }
}

fn insert_sorted(list: &mut Vec<NodeId>, id: NodeId) {
    if let Err(pos) = list.binary_search(&id) {
        list.insert(pos, id);
    }
}

/// Read-only compressed adjacency, indexed by raw node id. Absorbed ids are
/// present as isolated slots with no kind.
#[derive(Debug, Clone)]
pub struct FrozenGraph {
    offsets: Vec<usize>,
    targets: Vec<u32>,
    hf_offsets: Vec<usize>,
    hf_targets: Vec<u32>,
    kinds: Vec<Option<NodeKind>>,
    is_article: Vec<bool>,
    is_hf: Vec<bool>,
    articles: Vec<u32>,
    keyinfo: Vec<u32>,
    high_frequency: Vec<u32>,
    /// Position of each article in paper-id order; `u32::MAX` elsewhere.
    paper_rank: Vec<u32>,
    num_edges: usize,
}

impl FrozenGraph {
    fn build(g: &KnowledgeGraph) -> Self {
        let n = g.id_bound();
        let mut offsets = Vec::with_capacity(n + 1);
        let mut targets = Vec::with_capacity(2 * g.num_edges());
        let mut hf_offsets = Vec::with_capacity(n + 1);
        let mut hf_targets = Vec::new();
        offsets.push(0);
        hf_offsets.push(0);
        for list in &g.adjacency {
            for &v in list {
                targets.push(v.0);
                if g.high_frequency.contains(&v) {
                    hf_targets.push(v.0);
                }
            }
            offsets.push(targets.len());
            hf_offsets.push(hf_targets.len());
        }
        let kinds: Vec<Option<NodeKind>> = g.nodes.iter().map(|n| n.as_ref().map(|n| n.kind)).collect();
        let mut is_article = alloc::vec![false; n];
        let mut is_hf = alloc::vec![false; n];
        for a in &g.articles {
            is_article[a.index()] = true;
        }
        for h in &g.high_frequency {
            is_hf[h.index()] = true;
        }
        let mut paper_rank = alloc::vec![u32::MAX; n];
        for (rank, (_, id)) in g.papers.iter().enumerate() {
            paper_rank[id.index()] = rank as u32;
        }
        FrozenGraph {
            offsets,
            targets,
            hf_offsets,
            hf_targets,
            kinds,
            is_article,
            is_hf,
            articles: g.articles.iter().map(|id| id.0).collect(),
            keyinfo: g.keyinfo.iter().map(|id| id.0).collect(),
            high_frequency: g.high_frequency.iter().map(|id| id.0).collect(),
            paper_rank,
            num_edges: g.num_edges(),
        }
    }

    /// Exclusive upper bound on raw ids.
    pub fn id_bound(&self) -> usize {
        self.kinds.len()
    }

    pub fn num_nodes(&self) -> usize {
        self.articles.len() + self.keyinfo.len()
    }

    pub fn num_edges(&self) -> usize {
        self.num_edges
    }

    pub fn contains(&self, v: u32) -> bool {
        self.kinds.get(v as usize).is_some_and(|k| k.is_some())
    }

    pub fn kind(&self, v: u32) -> Option<NodeKind> {
        self.kinds.get(v as usize).copied().flatten()
    }

    #[inline]
    pub fn neighbors(&self, v: u32) -> &[u32] {
        let v = v as usize;
        &self.targets[self.offsets[v]..self.offsets[v + 1]]
    }

    /// Neighbors that are in V_h.
    #[inline]
    pub fn hf_neighbors(&self, v: u32) -> &[u32] {
        let v = v as usize;
        &self.hf_targets[self.hf_offsets[v]..self.hf_offsets[v + 1]]
    }

    /// Offset of `v`'s adjacency slice inside the flat target array; lets
    /// callers keep per-edge-slot counters.
    #[inline]
    pub fn slot_offset(&self, v: u32) -> usize {
        self.offsets[v as usize]
    }

    pub fn num_slots(&self) -> usize {
        self.targets.len()
    }

    #[inline]
    pub fn degree(&self, v: u32) -> usize {
        let v = v as usize;
        self.offsets[v + 1] - self.offsets[v]
    }

    #[inline]
    pub fn is_article(&self, v: u32) -> bool {
        self.is_article[v as usize]
    }

    #[inline]
    pub fn is_high_frequency(&self, v: u32) -> bool {
        self.is_hf[v as usize]
    }

    pub fn articles(&self) -> &[u32] {
        &self.articles
    }

    pub fn keyinfo(&self) -> &[u32] {
        &self.keyinfo
    }

    pub fn high_frequency(&self) -> &[u32] {
        &self.high_frequency
    }

    pub fn has_edge(&self, a: u32, b: u32) -> bool {
        self.neighbors(a).binary_search(&b).is_ok()
    }

    /// Rank of an article's paper id in lexicographic order.
    #[inline]
    pub fn paper_rank(&self, v: u32) -> u32 {
        self.paper_rank[v as usize]
    }
}
