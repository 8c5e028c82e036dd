#![allow(dead_code)]

use std::path::Path;

use kgbench::core::retrieval::{CorpusDocument, SearchHit};
use kgbench::corpus::load_corpus;
use kgbench::formats::vectors::{write_item_vectors, ItemVector};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub const DIM: usize = 8;

/// Writes `n` markdown documents with figures and a seeded vector file under
/// `dir`, then loads them back through the same path the server uses.
pub fn write_corpus(dir: &Path, n: usize, seed: u64) -> Vec<CorpusDocument> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let docs = dir.join("docs");
    std::fs::create_dir_all(&docs).unwrap();
    for d in 0..n {
        let sections = rng.random_range(1..4);
        let mut body = format!("# Document {d}\n\nIntroductory text for document {d}.\n");
        for s in 0..sections {
            body.push_str(&format!("\n## Part {s}\n\nWords about topic {} in part {s}.\n", rng.random_range(0..10)));
            if rng.random_bool(0.5) {
                body.push_str(&format!("\n![Figure {s} of {d}](fig/{d}_{s}.png)\n"));
            }
        }
        std::fs::write(docs.join(format!("doc{d:03}.md")), body).unwrap();
    }
    let plain = kgbench::corpus::read_corpus_dir(&docs, 16).unwrap();
    let mut vectors = Vec::new();
    for d in &plain {
        let ids = d.chunks.iter().map(|c| c.chunk_id.clone()).chain(d.images.iter().map(|i| i.image_id.clone()));
        for item_id in ids {
            let vector = (0..DIM).map(|_| rng.random_range(-1.0f32..1.0)).collect();
            vectors.push(ItemVector { item_id, vector });
        }
    }
    let vpath = dir.join("vectors.jsonl");
    write_item_vectors(&vpath, &vectors).unwrap();
    load_corpus(&docs, &vpath, 16).unwrap()
}

pub fn random_query(rng: &mut ChaCha8Rng) -> Vec<f32> {
    (0..DIM).map(|_| rng.random_range(-1.0f32..1.0)).collect()
}

fn unit(v: &[f32]) -> Vec<f64> {
    let n = v.iter().map(|&x| (x as f64).powi(2)).sum::<f64>().sqrt();
    v.iter().map(|&x| x as f64 / n).collect()
}

/// Top-k item ids by a full f64 sort: score descending, then doc id, then
/// corpus order.
pub fn naive_search(docs: &[CorpusDocument], q: &[f32], k: usize) -> Vec<(String, f64)> {
    let qn = unit(q);
    let mut all: Vec<(f64, &str, usize, String)> = Vec::new();
    for d in docs {
        let items = d
            .chunks
            .iter()
            .map(|c| (&c.chunk_id, c.vector.as_ref().unwrap()))
            .chain(d.images.iter().map(|i| (&i.image_id, i.vector.as_ref().unwrap())));
        for (id, v) in items {
            let s = unit(v).iter().zip(&qn).map(|(a, b)| a * b).sum();
            all.push((s, &d.doc_id, all.len(), id.clone()));
        }
    }
    all.sort_by(|a, b| b.0.total_cmp(&a.0).then(a.1.cmp(b.1)).then(a.2.cmp(&b.2)));
    all.into_iter().take(k).map(|(s, _, _, id)| (id, s)).collect()
}

/// Hits agree with the oracle in order, with scores within float noise.
pub fn matches_naive(hits: &[SearchHit], naive: &[(String, f64)]) -> bool {
    hits.len() == naive.len()
        && hits
            .iter()
            .zip(naive)
            .all(|(h, (id, s))| &h.item_id == id && (h.score as f64 - s).abs() < 1e-5)
}

/// Bipartite graph: articles get ids `0..articles`, key-information node `j`
/// gets id `articles + j`. `edges` are `(article, keyinfo)` index pairs.
pub fn bipartite(
    articles: usize,
    keyinfo: &[kgbench::core::NodeKind],
    edges: &[(usize, usize)],
) -> kgbench::core::KnowledgeGraph {
    use std::collections::BTreeSet;

    use kgbench::core::graph::GraphParts;
    use kgbench::core::{KnowledgeGraph, Node, NodeId, NodeKind, NodeOrigin, PaperId};

    let pid = |i: usize| PaperId::from(format!("p{i:04}"));
    let mut nodes = Vec::new();
    for i in 0..articles {
        nodes.push(Node {
            id: NodeId(i as u32),
            kind: NodeKind::Title,
            content: format!("paper {i}"),
            modality: NodeKind::Title.modality(),
            media: None,
            origin: NodeOrigin { paper_id: pid(i), ordinal: 0 },
            source_paper_ids: BTreeSet::from([pid(i)]),
        });
    }
    for (j, kind) in keyinfo.iter().enumerate() {
        let owners: BTreeSet<PaperId> = edges.iter().filter(|e| e.1 == j).map(|e| pid(e.0)).collect();
        let first = owners.first().cloned().unwrap_or_else(|| pid(0));
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
