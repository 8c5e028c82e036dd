//! Sidecar vector files (JSON lines).
//!
//! Node embeddings are keyed like the records they came from:
//! `{"paper_id": "p1", "kind": "datasets", "ordinal": 0, "vector": [...]}`.
//! Corpus vectors are keyed by item id (`doc#c0`, `doc#img1`):
//! `{"item_id": "doc#c0", "vector": [...]}`.

use std::collections::BTreeMap;
use std::path::Path;

use kgbench_core::merge::EmbeddingKey;
use kgbench_core::{NodeKind, NodeRecord, PaperId};
use serde::{Deserialize, Serialize};

use super::{read_jsonl, write_jsonl, FormatError};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct NodeVector {
    pub paper_id: PaperId,
    pub kind: NodeKind,
    pub ordinal: u16,
    pub vector: Vec<f32>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ItemVector {
    pub item_id: String,
    pub vector: Vec<f32>,
}

/// Later lines win when a key repeats.
pub fn read_node_vectors(path: &Path) -> Result<BTreeMap<EmbeddingKey, Vec<f32>>, FormatError> {
    Ok(read_jsonl::<NodeVector>(path)?
        .into_iter()
        .map(|v| {
            let key = EmbeddingKey {
                paper_id: v.paper_id,
                kind: v.kind,
                ordinal: v.ordinal,
            };
            (key, v.vector)
        })
        .collect())
}

pub fn write_node_vectors(path: &Path, vectors: &[NodeVector]) -> Result<(), FormatError> {
    write_jsonl(path, vectors)
}

/// Inline record embeddings, flattened into sidecar entries.
pub fn inline_vectors(records: &[NodeRecord]) -> Vec<NodeVector> {
    records
        .iter()
        .flat_map(|r| {
            r.embeddings.iter().map(|e| NodeVector {
                paper_id: r.paper_id.clone(),
                kind: e.kind,
                ordinal: e.ordinal,
                vector: e.vector.clone(),
            })
        })
        .collect()
}

pub fn read_item_vectors(path: &Path) -> Result<BTreeMap<String, Vec<f32>>, FormatError> {
    Ok(read_jsonl::<ItemVector>(path)?.into_iter().map(|v| (v.item_id, v.vector)).collect())
}

pub fn write_item_vectors(path: &Path, vectors: &[ItemVector]) -> Result<(), FormatError> {
    write_jsonl(path, vectors)
}
