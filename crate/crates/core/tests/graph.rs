mod common;

use kgbench_core::record::NodeRecord;
use kgbench_core::{KnowledgeGraph, NodeKind};
use proptest::prelude::*;

fn arb_record(i: usize) -> impl Strategy<Value = NodeRecord> {
    (
        proptest::sample::subsequence(NodeKind::KEY_INFO.to_vec(), 0..=12),
        proptest::collection::vec(proptest::sample::select(NodeKind::MEDIA.to_vec()), 0..4),
    )
        .prop_map(move |(kinds, media)| {
            let mut r = NodeRecord::new(format!("p{i}"), format!("title {i}"));
            for k in kinds {
                r = r.with_field(k, format!("{k} of {i}"));
            }
            for (j, k) in media.into_iter().enumerate() {
                r = r.with_attachment(k, format!("m{i}_{j}.png"), "caption");
            }
            r
        })
}

fn arb_records() -> impl Strategy<Value = Vec<NodeRecord>> {
    (1usize..12).prop_flat_map(|n| (0..n).map(arb_record).collect::<Vec<_>>())
}

fn build(records: &[NodeRecord]) -> KnowledgeGraph {
    let mut g = KnowledgeGraph::new();
    for r in records {
        g.add_paper_subgraph(r).unwrap();
    }
    g
}

proptest! {
    #[test]
    fn partition_is_exact(records in arb_records()) {
        let g = build(&records);
        for n in g.nodes() {
            let a = g.articles().contains(&n.id);
            let e = g.keyinfo().contains(&n.id);
            prop_assert!(a != e);
            prop_assert_eq!(a, n.kind == NodeKind::Title);
        }
        prop_assert_eq!(g.articles().len() + g.keyinfo().len(), g.num_nodes());
        prop_assert_eq!(g.articles().len(), records.len());
    }

    #[test]
    fn degrees_sum_to_twice_the_edges(records in arb_records()) {
        let g = build(&records);
        let total: usize = g.nodes().map(|n| g.neighbors(n.id).unwrap().len()).sum();
        prop_assert_eq!(total, 2 * g.num_edges());
        let f = g.freeze();
        let frozen: usize = g.nodes().map(|n| f.degree(n.id.0)).sum();
        prop_assert_eq!(frozen, 2 * g.num_edges());
    }

    #[test]
    fn belongs_to_shape_before_merge(records in arb_records()) {
        let g = build(&records);
        for e in g.keyinfo() {
            let nb = g.neighbors(*e).unwrap();
            prop_assert_eq!(nb.len(), 1);
            prop_assert!(g.articles().contains(&nb[0]));
        }
        g.check_invariants().unwrap();
    }

    #[test]
    fn parts_round_trip(records in arb_records()) {
        let g = build(&records);
        prop_assert_eq!(KnowledgeGraph::from_parts(g.to_parts()).unwrap(), g);
    }
}

#[test]
fn one_paper_with_three_fields() {
    let r = NodeRecord::new("p", "T")
        .with_field(NodeKind::Datasets, "d")
        .with_field(NodeKind::Metrics, "m")
        .with_field(NodeKind::Methodology, "x");
    let g = build(&[r]);
    assert_eq!((g.num_nodes(), g.num_edges()), (4, 3));
}

#[test]
fn bipartite_helper_matches_edges() {
    let g = common::bipartite(3, &[NodeKind::Datasets, NodeKind::Metrics], &[(0, 0), (1, 0), (2, 1)]);
    g.check_invariants().unwrap();
    assert_eq!(g.num_edges(), 3);
    assert_eq!(g.degree(kgbench_core::NodeId(3)), 2);
}
