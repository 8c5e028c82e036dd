//! Per-paper key-information records and batch validation.
//!
//! Records are produced by an external extraction stage; this module only
//! models them and checks a batch before graph construction. The on-disk
//! line format lives in the `kgbench` crate.

use alloc::collections::{BTreeMap, BTreeSet};
use alloc::string::String;
use alloc::vec::Vec;

use serde::{Deserialize, Serialize};

use crate::graph::PaperId;
use crate::kind::NodeKind;

/// Fewer populated key-information kinds than this produces a warning.
pub const SPARSE_RECORD_KINDS: usize = 5;

/// A media attachment (figure, table, formula or algorithm) referenced by path.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Attachment {
    pub kind: NodeKind,
    pub media: String,
    pub caption: String,
}

/// An embedding supplied inline with the record, addressed like a sidecar
/// entry by `(kind, ordinal)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct InlineEmbedding {
    pub kind: NodeKind,
    pub ordinal: u16,
    pub vector: Vec<f32>,
}

/// One paper's extracted key information.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct NodeRecord {
    pub paper_id: PaperId,
    pub title: String,
    /// Text payload per key-information kind. Never contains `Title`.
    pub fields: BTreeMap<NodeKind, String>,
    pub attachments: Vec<Attachment>,
    pub embeddings: Vec<InlineEmbedding>,
}

/// A key-information node a record will contribute to the graph.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PendingNode<'a> {
    pub kind: NodeKind,
    /// Position among this paper's nodes of the same kind: the text field (if
    /// any) is 0, attachments follow in record order.
    pub ordinal: u16,
    pub content: &'a str,
    pub media: Option<&'a str>,
}

impl NodeRecord {
    pub fn new(paper_id: impl Into<PaperId>, title: impl Into<String>) -> Self {
        NodeRecord {
            paper_id: paper_id.into(),
            title: title.into(),
            ..Default::default()
        }
    }

    pub fn with_field(mut self, kind: NodeKind, text: impl Into<String>) -> Self {
        self.fields.insert(kind, text.into());
        self
    }

    pub fn with_attachment(
        mut self,
        kind: NodeKind,
        media: impl Into<String>,
        caption: impl Into<String>,
    ) -> Self {
        self.attachments.push(Attachment {
            kind,
            media: media.into(),
            caption: caption.into(),
        });
        self
    }

    /// Key-information nodes in graph insertion order (kind order, then
    /// ordinal). Empty text payloads produce no node.
    pub fn pending_nodes(&self) -> Vec<PendingNode<'_>> {
        let mut out = Vec::new();
        for kind in NodeKind::KEY_INFO {
            let mut ordinal = 0u16;
            if let Some(text) = self.fields.get(&kind) {
                if !text.trim().is_empty() {
                    out.push(PendingNode {
                        kind,
                        ordinal,
                        content: text,
                        media: None,
                    });
                }
                ordinal += 1;
            }
            for att in self.attachments.iter().filter(|a| a.kind == kind) {
                out.push(PendingNode {
                    kind,
                    ordinal,
                    content: &att.caption,
                    media: Some(&att.media),
                });
                ordinal += 1;
            }
        }
        out
    }

    /// Number of distinct key-information kinds with at least one node.
    pub fn populated_kinds(&self) -> usize {
        self.pending_nodes()
            .iter()
            .map(|n| n.kind)
            .collect::<BTreeSet<_>>()
            .len()
    }
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(tag = "issue", rename_all = "snake_case")]
pub enum IssueKind {
    DuplicatePaperId { count: usize },
    EmptyPaperId,
    EmptyTitle,
    TitleAsField,
    MediaOnTextKind { kind: NodeKind },
    EmptyPayload { kind: NodeKind },
    SparseRecord { populated: usize },
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Issue {
    pub paper_id: PaperId,
    #[serde(flatten)]
    pub kind: IssueKind,
}

/// Outcome of [`validate_batch`]. Errors and warnings are sorted, so the report
/// does not depend on record order.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct ValidationReport {
    pub records: usize,
    pub errors: Vec<Issue>,
    pub warnings: Vec<Issue>,
}

impl ValidationReport {
    pub fn accepted(&self) -> bool {
        self.errors.is_empty()
    }
}

pub fn validate_batch(records: &[NodeRecord]) -> ValidationReport {
    let mut errors = Vec::new();
    let mut warnings = Vec::new();

    let mut seen: BTreeMap<&PaperId, usize> = BTreeMap::new();
    for r in records {
        *seen.entry(&r.paper_id).or_default() += 1;
    }
    for (id, &count) in &seen {
        if count > 1 {
            errors.push(Issue {
                paper_id: (*id).clone(),
                kind: IssueKind::DuplicatePaperId { count },
            });
        }
    }

    for r in records {
        let mut err = |kind| {
            errors.push(Issue {
                paper_id: r.paper_id.clone(),
                kind,
            })
        };
        if r.paper_id.as_str().trim().is_empty() {
            err(IssueKind::EmptyPaperId);
        }
        if r.title.trim().is_empty() {
            err(IssueKind::EmptyTitle);
        }
        if r.fields.contains_key(&NodeKind::Title) {
            err(IssueKind::TitleAsField);
        }
        for a in &r.attachments {
            if !a.kind.accepts_media() {
                err(IssueKind::MediaOnTextKind { kind: a.kind });
            }
        }

        for (kind, text) in &r.fields {
            if text.trim().is_empty() {
                warnings.push(Issue {
                    paper_id: r.paper_id.clone(),
                    kind: IssueKind::EmptyPayload { kind: *kind },
                });
            }
        }
        let populated = r.populated_kinds();
        if populated < SPARSE_RECORD_KINDS {
            warnings.push(Issue {
                paper_id: r.paper_id.clone(),
                kind: IssueKind::SparseRecord { populated },
            });
        }
    }

    errors.sort();
    errors.dedup();
    warnings.sort();
    warnings.dedup();
    ValidationReport {
        records: records.len(),
        errors,
        warnings,
    }
}
