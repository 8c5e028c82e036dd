#![allow(dead_code)]

use std::collections::BTreeSet;

use kgbench_core::graph::GraphParts;
use kgbench_core::{KnowledgeGraph, Node, NodeId, NodeKind, NodeOrigin, PaperId};

pub fn paper_id(i: usize) -> PaperId {
    PaperId::from(format!("p{i:04}"))
}

/// Bipartite graph: articles get ids `0..articles`, key-information node `j`
/// gets id `articles + j`. `edges` are `(article, keyinfo)` index pairs; every
/// key-information node must have at least one edge.
pub fn bipartite(articles: usize, keyinfo: &[NodeKind], edges: &[(usize, usize)]) -> KnowledgeGraph {
    let mut nodes = Vec::new();
    for i in 0..articles {
        nodes.push(Node {
            id: NodeId(i as u32),
            kind: NodeKind::Title,
            content: format!("paper {i}"),
            modality: NodeKind::Title.modality(),
            media: None,
            origin: NodeOrigin { paper_id: paper_id(i), ordinal: 0 },
            source_paper_ids: BTreeSet::from([paper_id(i)]),
        });
    }
    for (j, kind) in keyinfo.iter().enumerate() {
        let owners: BTreeSet<PaperId> = edges.iter().filter(|e| e.1 == j).map(|e| paper_id(e.0)).collect();
        let first = owners.first().cloned().unwrap_or_else(|| paper_id(0));
        nodes.push(Node {
            id: NodeId((articles + j) as u32),
            kind: *kind,
            content: format!("{kind} {j}"),
            modality: kind.modality(),
            media: None,
            origin: NodeOrigin { paper_id: first.clone(), ordinal: 0 },
            source_paper_ids: if owners.is_empty() { BTreeSet::from([first]) } else { owners },
        });
    }
    let edges = edges
        .iter()
        .map(|&(a, e)| (NodeId(a as u32), NodeId((articles + e) as u32)))
        .collect();
    KnowledgeGraph::from_parts(GraphParts {
        next_id: (articles + keyinfo.len()) as u32,
        nodes,
        edges,
        high_frequency: Vec::new(),
    })
    .expect("fixture is consistent")
}

/// Naive binomial coefficient, saturating.
pub fn choose(n: usize, k: usize) -> usize {
    if k > n {
        return 0;
    }
    let mut r: u128 = 1;
    for i in 0..k {
        r = r * (n - i) as u128 / (i + 1) as u128;
        if r > usize::MAX as u128 {
            return usize::MAX;
        }
    }
    r as usize
}
