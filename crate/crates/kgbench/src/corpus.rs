//! Loads a markdown corpus directory (`<doc_id>.md`) with its sidecar vectors.

use std::collections::BTreeMap;
use std::path::Path;

use kgbench_core::retrieval::CorpusDocument;

use crate::formats::vectors::read_item_vectors;
use crate::formats::FormatError;

pub const DEFAULT_CHUNK_TOKENS: usize = 256;

/// Documents parsed and chunked, in doc-id order, without vectors.
pub fn read_corpus_dir(dir: &Path, chunk_tokens: usize) -> Result<Vec<CorpusDocument>, FormatError> {
    let mut files: Vec<_> = std::fs::read_dir(dir)
        .map_err(|e| FormatError::io(dir, e))?
        .filter_map(|e| e.ok().map(|e| e.path()))
        .filter(|p| p.is_file() && p.extension().is_some_and(|x| x == "md"))
        .collect();
    files.sort();
    files
        .into_iter()
        .map(|p| {
            let stem = p.file_stem().and_then(|s| s.to_str()).ok_or_else(|| FormatError::content(&p, "file name is not utf-8"))?;
            let body = std::fs::read_to_string(&p).map_err(|e| FormatError::io(&p, e))?;
            Ok(CorpusDocument::from_markdown(stem, body, chunk_tokens))
        })
        .collect()
}

/// Attaches vectors by item id. Every chunk and image must have one.
pub fn attach_vectors(docs: &mut [CorpusDocument], vectors: &BTreeMap<String, Vec<f32>>, source: &Path) -> Result<(), FormatError> {
    let get = |id: &str| {
        vectors
            .get(id)
            .cloned()
            .ok_or_else(|| FormatError::content(source, format!("no vector for `{id}`")))
    };
    for d in docs.iter_mut() {
        for c in &mut d.chunks {
            c.vector = Some(get(&c.chunk_id)?);
        }
        for i in &mut d.images {
            i.vector = Some(get(&i.image_id)?);
        }
    }
    Ok(())
}

pub fn load_corpus(dir: &Path, vectors: &Path, chunk_tokens: usize) -> Result<Vec<CorpusDocument>, FormatError> {
    let mut docs = read_corpus_dir(dir, chunk_tokens)?;
    attach_vectors(&mut docs, &read_item_vectors(vectors)?, vectors)?;
    Ok(docs)
}
