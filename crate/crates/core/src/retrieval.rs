//! Agent-facing local tools: exact inner-product search over text chunks and
//! images, and whole-document visits.
//!
//! Vectors come from an external encoder. They are unit-normalised at build
//! time so scores are cosines. Search is an exact scan; there is no
//! approximation anywhere in this module.

use alloc::collections::BTreeMap;
use alloc::format;
use alloc::string::{String, ToString};
use alloc::vec::Vec;
use core::fmt::Write as _;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::vector::{dot, normalize, normalized};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum RetrievalError {
    #[error("{item} has dimension {got}, expected {expected}")]
    DimensionMismatch { item: String, expected: usize, got: usize },
    #[error("{0} has no vector")]
    MissingVector(String),
    #[error("document `{0}` not found")]
    NotFound(String),
    #[error("document `{0}` appears twice")]
    DuplicateDocument(String),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ImageRef {
    pub image_id: String,
    pub path: String,
    pub caption: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub vector: Option<Vec<f32>>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Chunk {
    pub chunk_id: String,
    pub text: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub vector: Option<Vec<f32>>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CorpusDocument {
    pub doc_id: String,
    pub body: String,
    pub images: Vec<ImageRef>,
    pub chunks: Vec<Chunk>,
}

impl CorpusDocument {
    /// Parses image references and chunks `body`; vectors are attached later.
    pub fn from_markdown(doc_id: impl Into<String>, body: impl Into<String>, max_tokens: usize) -> Self {
        let doc_id = doc_id.into();
        let body = body.into();
        let images = parse_image_refs(&body)
            .into_iter()
            .enumerate()
            .map(|(i, (caption, path))| ImageRef {
                image_id: format!("{doc_id}#img{i}"),
                path,
                caption,
                vector: None,
            })
            .collect();
        let chunks = chunk_markdown(&body, max_tokens)
            .into_iter()
            .enumerate()
            .map(|(i, text)| Chunk {
                chunk_id: format!("{doc_id}#c{i}"),
                text,
                vector: None,
            })
            .collect();
        CorpusDocument { doc_id, body, images, chunks }
    }
}

/// `![caption](path)` occurrences in order, as (caption, path).
pub fn parse_image_refs(markdown: &str) -> Vec<(String, String)> {
    let mut out = Vec::new();
    let mut rest = markdown;
    while let Some(start) = rest.find("![") {
        let after = &rest[start + 2..];
        let Some(close) = after.find("](") else { break };
        let caption = &after[..close];
        let tail = &after[close + 2..];
        let Some(end) = tail.find(')') else { break };
        if !caption.contains('\n') {
            out.push((caption.trim().to_string(), tail[..end].trim().to_string()));
        }
        rest = &tail[end + 1..];
    }
    out
}

fn is_heading(line: &str) -> bool {
    let t = line.trim_start();
    let hashes = t.bytes().take_while(|&b| b == b'#').count();
    (1..=6).contains(&hashes) && t[hashes..].starts_with([' ', '\t'])
}

/// Splits at heading lines; sections over `max_tokens` whitespace tokens are
/// cut into consecutive pieces. No overlap, no empty chunks.
pub fn chunk_markdown(markdown: &str, max_tokens: usize) -> Vec<String> {
    let max_tokens = max_tokens.max(1);
    let mut sections: Vec<Vec<&str>> = alloc::vec![Vec::new()];
    for line in markdown.lines() {
        if is_heading(line) && !sections.last().expect("non-empty").is_empty() {
            sections.push(Vec::new());
        }
        sections.last_mut().expect("non-empty").push(line);
    }

    let mut out = Vec::new();
    for section in sections {
        let mut piece = String::new();
        let mut tokens = 0;
        for line in section {
            for word in line.split_whitespace() {
                if tokens == max_tokens {
                    out.push(core::mem::take(&mut piece));
                    tokens = 0;
                }
                if tokens > 0 {
                    piece.push(' ');
                }
                piece.push_str(word);
                tokens += 1;
            }
        }
        if tokens > 0 {
            out.push(piece);
        }
    }
    out
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum HitModality {
    Text,
    Image,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SearchHit {
    pub doc_id: String,
    /// Chunk id or image id.
    pub item_id: String,
    pub score: f32,
    pub modality: HitModality,
    /// Chunk text, or the stored caption for images.
    pub content: String,
}

#[derive(Debug, Clone, PartialEq)]
struct Entry {
    doc_id: String,
    item_id: String,
    modality: HitModality,
    content: String,
}

/// One flat inner-product index over every chunk and image vector.
#[derive(Debug, Clone, PartialEq)]
pub struct CorpusIndex {
    dim: usize,
    entries: Vec<Entry>,
    data: Vec<f32>,
}

pub fn build_corpus_index(docs: &[CorpusDocument], dim: usize) -> Result<CorpusIndex, RetrievalError> {
    let mut idx = CorpusIndex {
        dim,
        entries: Vec::new(),
        data: Vec::new(),
    };
    for d in docs {
        let items = d
            .chunks
            .iter()
            .map(|c| (&c.chunk_id, &c.vector, HitModality::Text, &c.text))
            .chain(d.images.iter().map(|i| (&i.image_id, &i.vector, HitModality::Image, &i.caption)));
        for (item_id, vector, modality, content) in items {
            let v = vector.as_ref().ok_or_else(|| RetrievalError::MissingVector(item_id.clone()))?;
            if v.len() != dim {
                return Err(RetrievalError::DimensionMismatch {
                    item: item_id.clone(),
                    expected: dim,
                    got: v.len(),
                });
            }
            let start = idx.data.len();
            idx.data.extend_from_slice(v);
            normalize(&mut idx.data[start..]);
            idx.entries.push(Entry {
                doc_id: d.doc_id.clone(),
                item_id: item_id.clone(),
                modality,
                content: content.clone(),
            });
        }
    }
    Ok(idx)
}

impl CorpusIndex {
    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn dimension(&self) -> usize {
        self.dim
    }

    /// Stored (normalised) vector of entry `i`.
    pub fn vector(&self, i: usize) -> &[f32] {
        &self.data[i * self.dim..(i + 1) * self.dim]
    }

    pub fn item_id(&self, i: usize) -> &str {
        &self.entries[i].item_id
    }
}

/// Top-`top_k` entries by inner product with the normalised query; ties go to
/// the smaller doc id, then to index order.
pub fn file_search(index: &CorpusIndex, query: &[f32], top_k: usize) -> Result<Vec<SearchHit>, RetrievalError> {
    if query.len() != index.dim {
        return Err(RetrievalError::DimensionMismatch {
            item: "query".into(),
            expected: index.dim,
            got: query.len(),
        });
    }
    let q = normalized(query);
    let mut scored: Vec<(f32, usize)> = (0..index.len()).map(|i| (dot(&q, index.vector(i)), i)).collect();
    let order = |a: &(f32, usize), b: &(f32, usize)| {
        b.0.total_cmp(&a.0)
            .then_with(|| index.entries[a.1].doc_id.cmp(&index.entries[b.1].doc_id))
            .then(a.1.cmp(&b.1))
    };
    if top_k < scored.len() {
        scored.select_nth_unstable_by(top_k, order);
        scored.truncate(top_k);
    }
    scored.sort_by(order);
    Ok(scored
        .into_iter()
        .map(|(score, i)| {
            let e = &index.entries[i];
            SearchHit {
                doc_id: e.doc_id.clone(),
                item_id: e.item_id.clone(),
                score,
                modality: e.modality,
                content: e.content.clone(),
            }
        })
        .collect())
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct VisitImage {
    pub image_id: String,
    pub path: String,
    pub caption: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct VisitPayload {
    pub doc_id: String,
    pub markdown: String,
    pub images: Vec<VisitImage>,
}

/// Hex sha256 over a length-prefixed encoding of the payload.
pub fn payload_digest(p: &VisitPayload) -> String {
    let mut h = Sha256::new();
    let mut field = |s: &str| {
        h.update((s.len() as u64).to_le_bytes());
        h.update(s.as_bytes());
    };
    field(&p.doc_id);
    field(&p.markdown);
    for img in &p.images {
        field(&img.image_id);
        field(&img.path);
        field(&img.caption);
    }
    let mut out = String::with_capacity(64);
    for b in h.finalize() {
        let _ = write!(out, "{b:02x}");
    }
    out
}

/// Parsed documents keyed by id, with the digest taken at ingestion.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct DocumentStore {
    docs: BTreeMap<String, (VisitPayload, String)>,
}

impl DocumentStore {
    pub fn build(docs: &[CorpusDocument]) -> Result<Self, RetrievalError> {
        let mut store = DocumentStore::default();
        for d in docs {
            let payload = VisitPayload {
                doc_id: d.doc_id.clone(),
                markdown: d.body.clone(),
                images: d
                    .images
                    .iter()
                    .map(|i| VisitImage {
                        image_id: i.image_id.clone(),
                        path: i.path.clone(),
                        caption: i.caption.clone(),
                    })
                    .collect(),
            };
            let digest = payload_digest(&payload);
            if store.docs.insert(d.doc_id.clone(), (payload, digest)).is_some() {
                return Err(RetrievalError::DuplicateDocument(d.doc_id.clone()));
            }
        }
        Ok(store)
    }

    pub fn len(&self) -> usize {
        self.docs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.docs.is_empty()
    }

    pub fn doc_ids(&self) -> impl Iterator<Item = &str> {
        self.docs.keys().map(String::as_str)
    }

    pub fn ingest_digest(&self, doc_id: &str) -> Option<&str> {
        self.docs.get(doc_id).map(|(_, d)| d.as_str())
    }
}

pub fn file_visit(store: &DocumentStore, doc_id: &str) -> Result<VisitPayload, RetrievalError> {
    store
        .docs
        .get(doc_id)
        .map(|(p, _)| p.clone())
        .ok_or_else(|| RetrievalError::NotFound(doc_id.into()))
}
