//! JSON-lines node records, one paper per line.
//!
//! ```json
//! {"paper_id": "p1", "title": "...",
//!  "fields": {"datasets": "ImageNet", "methodology": "..."},
//!  "attachments": [{"kind": "figures", "media": "fig1.png", "caption": "..."}],
//!  "embeddings": [{"kind": "datasets", "ordinal": 0, "vector": [0.1, ...]}]}
//! ```
//!
//! Only `paper_id` and `title` are required. Parsing is strict: unknown or
//! repeated keys are errors, and every error carries its line and field.

use std::collections::BTreeMap;
use std::fmt;
use std::fs;
use std::path::{Path, PathBuf};

use kgbench_core::record::InlineEmbedding;
use kgbench_core::{Attachment, NodeKind, NodeRecord};
use serde::de::{Deserializer, MapAccess, Visitor};
use serde::Deserialize;
use serde_json::value::RawValue;

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ParseErrorKind {
    Syntax(String),
    UnknownField(String),
    MissingField(&'static str),
    DuplicateField(String),
    UnknownKind(String),
    DuplicateKind(NodeKind),
    TitleAsField,
    EmptyTitle,
    InvalidValue(String),
}

impl fmt::Display for ParseErrorKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ParseErrorKind::Syntax(m) => write!(f, "malformed json: {m}"),
            ParseErrorKind::UnknownField(k) => write!(f, "unknown field `{k}`"),
            ParseErrorKind::MissingField(k) => write!(f, "missing field `{k}`"),
            ParseErrorKind::DuplicateField(k) => write!(f, "field `{k}` given twice"),
            ParseErrorKind::UnknownKind(k) => write!(f, "unknown node kind `{k}`"),
            ParseErrorKind::DuplicateKind(k) => write!(f, "kind `{k}` given twice"),
            ParseErrorKind::TitleAsField => f.write_str("the title belongs in `title`, not in `fields`"),
            ParseErrorKind::EmptyTitle => f.write_str("title is empty"),
            ParseErrorKind::InvalidValue(m) => write!(f, "invalid value: {m}"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub struct ParseError {
    pub line: usize,
    pub field: Option<String>,
    pub kind: ParseErrorKind,
}

impl fmt::Display for ParseError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.field {
            Some(field) => write!(f, "line {}, field `{}`: {}", self.line, field, self.kind),
            None => write!(f, "line {}: {}", self.line, self.kind),
        }
    }
}

/// Object entries in source order; unlike a map, repeated keys survive.
struct Entries<V>(Vec<(String, V)>);

impl<'de, V: Deserialize<'de>> Deserialize<'de> for Entries<V> {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        struct V2<V>(std::marker::PhantomData<V>);
        impl<'de, V: Deserialize<'de>> Visitor<'de> for V2<V> {
            type Value = Entries<V>;
            fn expecting(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
                f.write_str("a json object")
            }
            fn visit_map<A: MapAccess<'de>>(self, mut m: A) -> Result<Self::Value, A::Error> {
                let mut out = Vec::new();
                while let Some(e) = m.next_entry::<String, V>()? {
                    out.push(e);
                }
                Ok(Entries(out))
            }
        }
        d.deserialize_map(V2(std::marker::PhantomData))
    }
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawAttachment {
    kind: String,
    media: String,
    #[serde(default)]
    caption: String,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawEmbedding {
    kind: String,
    ordinal: u16,
    vector: Vec<f32>,
}

fn kind(s: &str) -> Result<NodeKind, ParseErrorKind> {
    s.parse().map_err(|_| ParseErrorKind::UnknownKind(s.to_owned()))
}

/// Parses and validates one record line. `line` is 1-based and only used for
/// error locations.
pub fn parse_node_record(text: &str, line: usize) -> Result<NodeRecord, ParseError> {
    let err = |field: Option<String>, kind| ParseError { line, field, kind };
    let syntax = |field: Option<String>, e: serde_json::Error| err(field, ParseErrorKind::Syntax(e.to_string()));

    let top: Entries<Box<RawValue>> = serde_json::from_str(text).map_err(|e| syntax(None, e))?;
    let mut seen: BTreeMap<&str, &RawValue> = BTreeMap::new();
    for (k, v) in &top.0 {
        if !matches!(k.as_str(), "paper_id" | "title" | "fields" | "attachments" | "embeddings") {
            return Err(err(Some(k.clone()), ParseErrorKind::UnknownField(k.clone())));
        }
        if seen.insert(k, v).is_some() {
            return Err(err(Some(k.clone()), ParseErrorKind::DuplicateField(k.clone())));
        }
    }

    let string = |key: &'static str| -> Result<String, ParseError> {
        let raw = seen.get(key).ok_or_else(|| err(None, ParseErrorKind::MissingField(key)))?;
        serde_json::from_str::<String>(raw.get())
            .map_err(|_| err(Some(key.into()), ParseErrorKind::InvalidValue("expected a string".into())))
    };
    let paper_id = string("paper_id")?;
    if paper_id.trim().is_empty() {
        return Err(err(Some("paper_id".into()), ParseErrorKind::InvalidValue("paper_id is empty".into())));
    }
    let title = string("title")?;
    if title.trim().is_empty() {
        return Err(err(Some("title".into()), ParseErrorKind::EmptyTitle));
    }
    let mut record = NodeRecord::new(paper_id, title);

    if let Some(raw) = seen.get("fields") {
        let entries: Entries<String> =
            serde_json::from_str(raw.get()).map_err(|e| syntax(Some("fields".into()), e))?;
        for (name, text) in entries.0 {
            let at = Some(format!("fields.{name}"));
            let k = kind(&name).map_err(|e| err(at.clone(), e))?;
            if k == NodeKind::Title {
                return Err(err(at, ParseErrorKind::TitleAsField));
            }
            if record.fields.insert(k, text).is_some() {
                return Err(err(at, ParseErrorKind::DuplicateKind(k)));
            }
        }
    }

    if let Some(raw) = seen.get("attachments") {
        let list: Vec<Box<RawValue>> =
            serde_json::from_str(raw.get()).map_err(|e| syntax(Some("attachments".into()), e))?;
        for (i, item) in list.iter().enumerate() {
            let at = format!("attachments[{i}]");
            let a: RawAttachment = serde_json::from_str(item.get()).map_err(|e| syntax(Some(at.clone()), e))?;
            let k = kind(&a.kind).map_err(|e| err(Some(format!("{at}.kind")), e))?;
            record.attachments.push(Attachment {
                kind: k,
                media: a.media,
                caption: a.caption,
            });
        }
    }

    if let Some(raw) = seen.get("embeddings") {
        let list: Vec<Box<RawValue>> =
            serde_json::from_str(raw.get()).map_err(|e| syntax(Some("embeddings".into()), e))?;
        for (i, item) in list.iter().enumerate() {
            let at = format!("embeddings[{i}]");
            let e: RawEmbedding = serde_json::from_str(item.get()).map_err(|e| syntax(Some(at.clone()), e))?;
            let k = kind(&e.kind).map_err(|x| err(Some(format!("{at}.kind")), x))?;
            record.embeddings.push(InlineEmbedding {
                kind: k,
                ordinal: e.ordinal,
                vector: e.vector,
            });
        }
    }
    Ok(record)
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LocatedError {
    pub path: PathBuf,
    pub error: ParseError,
}

impl fmt::Display for LocatedError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}: {}", self.path.display(), self.error)
    }
}

/// Every `*.jsonl` file under `dir` (not recursive), in file-name order.
pub fn record_files(dir: &Path) -> std::io::Result<Vec<PathBuf>> {
    let mut files: Vec<PathBuf> = fs::read_dir(dir)?
        .filter_map(|e| e.ok().map(|e| e.path()))
        .filter(|p| p.is_file() && p.extension().is_some_and(|x| x == "jsonl"))
        .collect();
    files.sort();
    Ok(files)
}

/// Reads every record in `dir`. Blank lines are skipped. A bad line does not
/// stop the scan; all of them are reported.
pub fn read_records_dir(dir: &Path) -> std::io::Result<(Vec<NodeRecord>, Vec<LocatedError>)> {
    let mut records = Vec::new();
    let mut errors = Vec::new();
    for path in record_files(dir)? {
        let text = fs::read_to_string(&path)?;
        for (i, line) in text.lines().enumerate() {
            if line.trim().is_empty() {
                continue;
            }
            match parse_node_record(line, i + 1) {
                Ok(r) => records.push(r),
                Err(error) => errors.push(LocatedError {
                    path: path.clone(),
                    error,
                }),
            }
        }
    }
    Ok((records, errors))
}
