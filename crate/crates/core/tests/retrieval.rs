use kgbench_core::retrieval::{
    build_corpus_index, chunk_markdown, file_search, file_visit, parse_image_refs, payload_digest, Chunk, CorpusDocument,
    DocumentStore, ImageRef,
};
use proptest::prelude::*;

/// Documents with random chunk and image vectors; `dim`-dimensional.
fn arb_docs(dim: usize) -> impl Strategy<Value = Vec<CorpusDocument>> {
    let v = move || proptest::collection::vec(-4i8..=4, dim).prop_map(|v| v.into_iter().map(f32::from).collect::<Vec<_>>());
    proptest::collection::vec((proptest::collection::vec(v(), 1..4), proptest::collection::vec(v(), 0..2)), 1..8).prop_map(|docs| {
        docs.into_iter()
            .enumerate()
            .map(|(d, (chunks, images))| {
                let id = format!("doc{d}");
                CorpusDocument {
                    body: format!("# {id}"),
                    chunks: chunks
                        .into_iter()
                        .enumerate()
                        .map(|(i, v)| Chunk { chunk_id: format!("{id}#c{i}"), text: format!("t{i}"), vector: Some(v) })
                        .collect(),
                    images: images
                        .into_iter()
                        .enumerate()
                        .map(|(i, v)| ImageRef { image_id: format!("{id}#img{i}"), path: "x.png".into(), caption: "c".into(), vector: Some(v) })
                        .collect(),
                    doc_id: id,
                }
            })
            .collect()
    })
}

fn unit(v: &[f32]) -> Vec<f64> {
    let n = v.iter().map(|&x| (x as f64).powi(2)).sum::<f64>().sqrt();
    v.iter().map(|&x| if n == 0.0 { 0.0 } else { x as f64 / n }).collect()
}

proptest! {
    #[test]
    fn search_equals_naive_sort(docs in arb_docs(4), q in proptest::collection::vec(-4i8..=4, 4), k in 1usize..20) {
        let q: Vec<f32> = q.into_iter().map(f32::from).collect();
        prop_assume!(q.iter().any(|x| *x != 0.0));
        let idx = build_corpus_index(&docs, 4).unwrap();
        let hits = file_search(&idx, &q, k).unwrap();

        let qn = unit(&q);
        let mut naive: Vec<(f64, String, usize, String)> = Vec::new();
        let mut pos = 0;
        for d in &docs {
            let items = d.chunks.iter().map(|c| (&c.chunk_id, c.vector.as_ref().unwrap()))
                .chain(d.images.iter().map(|i| (&i.image_id, i.vector.as_ref().unwrap())));
            for (id, v) in items {
                let s: f64 = unit(v).iter().zip(&qn).map(|(a, b)| a * b).sum();
                naive.push((s, d.doc_id.clone(), pos, id.clone()));
                pos += 1;
            }
        }
        naive.sort_by(|a, b| b.0.total_cmp(&a.0).then(a.1.cmp(&b.1)).then(a.2.cmp(&b.2)));
        let full = naive.clone();
        naive.truncate(k);
        prop_assert_eq!(hits.len(), naive.len());
        for (h, n) in hits.iter().zip(&naive) {
            prop_assert!((h.score as f64 - n.0).abs() < 1e-5);
        }
        // Ids agree wherever scores are separated by more than float noise.
        for (i, (h, n)) in hits.iter().zip(&naive).enumerate() {
            let isolated = full.iter().enumerate().all(|(j, m)| j == i || (m.0 - n.0).abs() > 1e-5);
            if isolated {
                prop_assert_eq!(&h.item_id, &n.3);
            }
        }
    }

    #[test]
    fn repeated_search_is_identical(docs in arb_docs(3), q in proptest::collection::vec(-3i8..=3, 3)) {
        let q: Vec<f32> = q.into_iter().map(f32::from).collect();
        let idx = build_corpus_index(&docs, 3).unwrap();
        prop_assert_eq!(file_search(&idx, &q, 5).unwrap(), file_search(&idx, &q, 5).unwrap());
    }
}

#[test]
fn visit_digest_matches_ingestion() {
    let body = "# Title\n\nText ![A chart](figs/a.png) more.\n\n## Next\n\n![Second](b.png)";
    let d = CorpusDocument::from_markdown("paper", body, 64);
    assert_eq!(d.images.len(), 2);
    assert_eq!(d.images[1].image_id, "paper#img1");
    let store = DocumentStore::build(&[d]).unwrap();
    let p = file_visit(&store, "paper").unwrap();
    assert_eq!(p.markdown, body);
    assert_eq!(store.ingest_digest("paper").unwrap(), payload_digest(&p));
    assert!(file_visit(&store, "nope").is_err());
}

#[test]
fn markdown_helpers() {
    assert_eq!(parse_image_refs("![a](x.png) and ![b c](y.jpg)"), vec![("a".into(), "x.png".into()), ("b c".into(), "y.jpg".into())]);
    let chunks = chunk_markdown("# A\none two three\n# B\nfour", 2);
    assert_eq!(chunks, vec!["# A", "one two", "three", "# B", "four"]);
}

#[test]
fn dimension_errors() {
    let d = CorpusDocument {
        doc_id: "d".into(),
        body: String::new(),
        images: vec![],
        chunks: vec![Chunk { chunk_id: "d#c0".into(), text: "t".into(), vector: Some(vec![1.0, 0.0]) }],
    };
    assert!(build_corpus_index(std::slice::from_ref(&d), 3).is_err());
    let idx = build_corpus_index(&[d], 2).unwrap();
    assert!(file_search(&idx, &[1.0], 1).is_err());
}
