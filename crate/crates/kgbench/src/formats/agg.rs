//! Pair-aggregate files: a header line, then one `(article, keyinfo, count)`
//! line per pair in ascending pair order.

use std::io::{BufRead, BufReader, BufWriter, Write};
use std::path::{Path, PathBuf};

use kgbench_core::orwas::{PairAggregate, PairCount, WalkConfig, WalkStats};
use kgbench_core::NodeId;
use serde::{Deserialize, Serialize};

use super::FormatError;

pub const AGG_FORMAT: &str = "kgbench.agg/1";

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AggHeader {
    pub format: String,
    /// Snapshot the walks ran on; `snapshot_crc` pins its exact contents.
    pub snapshot: PathBuf,
    pub snapshot_crc: u32,
    pub walk: WalkConfig,
    pub quantile: f64,
    pub high_frequency: usize,
    pub stats: WalkStats,
}

pub fn write_agg(path: &Path, header: &AggHeader, agg: &PairAggregate) -> Result<(), FormatError> {
    let file = std::fs::File::create(path).map_err(|e| FormatError::io(path, e))?;
    let mut w = BufWriter::new(file);
    let io = |e| FormatError::io(path, e);
    serde_json::to_writer(&mut w, header).expect("header serializes");
    w.write_all(b"\n").map_err(io)?;
    for p in agg.pairs() {
        writeln!(w, "{}\t{}\t{}", p.article.0, p.keyinfo.0, p.count).map_err(io)?;
    }
    w.flush().map_err(io)
}

pub fn read_agg(path: &Path) -> Result<(AggHeader, PairAggregate), FormatError> {
    let file = std::fs::File::open(path).map_err(|e| FormatError::io(path, e))?;
    let mut lines = BufReader::new(file).lines();
    let bad = |line: usize, message: String| FormatError::Line {
        path: path.to_owned(),
        line,
        message,
    };
    let first = lines
        .next()
        .ok_or_else(|| FormatError::content(path, "empty aggregate file"))?
        .map_err(|e| FormatError::io(path, e))?;
    let header: AggHeader = serde_json::from_str(&first).map_err(|e| bad(1, e.to_string()))?;
    if header.format != AGG_FORMAT {
        return Err(bad(1, format!("format `{}` is not `{AGG_FORMAT}`", header.format)));
    }
    let mut pairs = Vec::new();
    for (i, line) in lines.enumerate() {
        let line = line.map_err(|e| FormatError::io(path, e))?;
        if line.is_empty() {
            continue;
        }
        let mut it = line.split('\t').map(str::parse::<u32>);
        match (it.next(), it.next(), it.next(), it.next()) {
            (Some(Ok(a)), Some(Ok(e)), Some(Ok(c)), None) => pairs.push(PairCount {
                article: NodeId(a),
                keyinfo: NodeId(e),
                count: c,
            }),
            _ => return Err(bad(i + 2, "expected `article<TAB>keyinfo<TAB>count`".into())),
        }
    }
    Ok((header, PairAggregate::from_pairs(pairs)))
}
