//! Versioned, checksummed graph snapshots.
//!
//! Layout (little endian):
//!
//! ```text
//! magic     8 bytes  "KGBSNAP\0"
//! version   u32
//! schema    u16 length + utf-8 tag
//! payload   u64 length + bincode(GraphParts)
//! crc32     u32 over every preceding byte
//! ```
//!
//! `GraphParts` is fully ordered, so saving the same graph twice yields the
//! same bytes.

use std::fs;
use std::path::Path;

use kgbench_core::graph::{GraphError, GraphParts, KnowledgeGraph};

pub const MAGIC: &[u8; 8] = b"KGBSNAP\0";
pub const VERSION: u32 = 1;
pub const SCHEMA: &str = "kgbench.graph-parts";

#[derive(Debug, thiserror::Error)]
pub enum SnapshotError {
    #[error("not a snapshot file (bad magic)")]
    BadMagic,
    #[error("snapshot version {found} is not supported (expected {expected})")]
    VersionMismatch { found: u32, expected: u32 },
    #[error("snapshot schema `{0}` is not `{SCHEMA}`")]
    SchemaMismatch(String),
    #[error("snapshot is truncated")]
    Truncated,
    #[error("snapshot checksum mismatch (stored {stored:08x}, computed {computed:08x})")]
    Checksum { stored: u32, computed: u32 },
    #[error("snapshot payload does not decode: {0}")]
    Decode(String),
    #[error("snapshot payload is not a valid graph: {0}")]
    Graph(#[from] GraphError),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub fn to_bytes(graph: &KnowledgeGraph) -> Vec<u8> {
    let payload = bincode::serialize(&graph.to_parts()).expect("graph parts always serialize");
    let mut out = Vec::with_capacity(payload.len() + 64);
    out.extend_from_slice(MAGIC);
    out.extend_from_slice(&VERSION.to_le_bytes());
    out.extend_from_slice(&(SCHEMA.len() as u16).to_le_bytes());
    out.extend_from_slice(SCHEMA.as_bytes());
    out.extend_from_slice(&(payload.len() as u64).to_le_bytes());
    out.extend_from_slice(&payload);
    let crc = crc32fast::hash(&out);
    out.extend_from_slice(&crc.to_le_bytes());
    out
}

struct Reader<'a> {
    buf: &'a [u8],
    pos: usize,
}

impl<'a> Reader<'a> {
    fn take(&mut self, n: usize) -> Result<&'a [u8], SnapshotError> {
        let end = self.pos.checked_add(n).ok_or(SnapshotError::Truncated)?;
        let s = self.buf.get(self.pos..end).ok_or(SnapshotError::Truncated)?;
        self.pos = end;
        Ok(s)
    }

    fn u16(&mut self) -> Result<u16, SnapshotError> {
        Ok(u16::from_le_bytes(self.take(2)?.try_into().unwrap()))
    }

    fn u32(&mut self) -> Result<u32, SnapshotError> {
        Ok(u32::from_le_bytes(self.take(4)?.try_into().unwrap()))
    }

    fn u64(&mut self) -> Result<u64, SnapshotError> {
        Ok(u64::from_le_bytes(self.take(8)?.try_into().unwrap()))
    }
}

pub fn from_bytes(bytes: &[u8]) -> Result<KnowledgeGraph, SnapshotError> {
    let mut r = Reader { buf: bytes, pos: 0 };
    if r.take(MAGIC.len()).map_err(|_| SnapshotError::BadMagic)? != MAGIC {
        return Err(SnapshotError::BadMagic);
    }
    let version = r.u32()?;
    if version != VERSION {
        return Err(SnapshotError::VersionMismatch {
            found: version,
            expected: VERSION,
        });
    }
    let tag_len = r.u16()? as usize;
    let tag = r.take(tag_len)?;
    let len = r.u64()?;
    let payload = r.take(usize::try_from(len).map_err(|_| SnapshotError::Truncated)?)?;
    let body_end = r.pos;
    let stored = r.u32()?;
    let computed = crc32fast::hash(&bytes[..body_end]);
    if stored != computed || r.pos != bytes.len() {
        return Err(SnapshotError::Checksum { stored, computed });
    }
    if tag != SCHEMA.as_bytes() {
        return Err(SnapshotError::SchemaMismatch(String::from_utf8_lossy(tag).into_owned()));
    }
    let parts: GraphParts = bincode::deserialize(payload).map_err(|e| SnapshotError::Decode(e.to_string()))?;
    Ok(KnowledgeGraph::from_parts(parts)?)
}

pub fn save_snapshot(graph: &KnowledgeGraph, path: &Path) -> Result<u32, SnapshotError> {
    let bytes = to_bytes(graph);
    fs::write(path, &bytes)?;
    Ok(trailer_crc(&bytes))
}

pub fn load_snapshot(path: &Path) -> Result<KnowledgeGraph, SnapshotError> {
    from_bytes(&fs::read(path)?)
}

/// The stored checksum of a snapshot, used to tie derived files to it.
pub fn trailer_crc(bytes: &[u8]) -> u32 {
    let n = bytes.len();
    if n < 4 {
        return 0;
    }
    u32::from_le_bytes(bytes[n - 4..].try_into().unwrap())
}
