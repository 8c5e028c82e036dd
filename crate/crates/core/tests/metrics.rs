use std::collections::BTreeSet;

use kgbench_core::metrics::{
    aggregate_judge_scores, exact_match, macro_report, normalize_answer, recall_at_k, Gold, JudgeScheme, JudgeScores,
    Prediction, ReportConfig, TaskResult,
};
use kgbench_core::taskgen::SubTask;
use proptest::prelude::*;

fn arb_answer() -> impl Strategy<Value = String> {
    proptest::string::string_regex("[ aAbB1.,!?:;\t]{0,8}").unwrap()
}

fn arb_result(i: usize) -> impl Strategy<Value = TaskResult> {
    (proptest::sample::select(SubTask::ALL.to_vec()), 0u32..=100, 0u32..=100, any::<bool>()).prop_map(move |(sub, x, y, hit)| {
        use kgbench_core::taskgen::TaskFamily::*;
        let family = sub.family();
        let (prediction, gold, judge) = match family {
            Reasoning => (
                Prediction::Answer(if hit { "42".into() } else { "41".into() }),
                Gold::Answer("42".into()),
                None,
            ),
            TopicInduction => (
                Prediction::Ranked(vec!["d1".into(), format!("d{}", x % 4)]),
                Gold::Docs(vec!["d1".into(), "d2".into(), "d3".into()]),
                None,
            ),
            Summary | Solution => {
                let scheme = JudgeScheme::for_family(family).unwrap();
                let scores: JudgeScores = scheme
                    .dimensions()
                    .iter()
                    .enumerate()
                    .map(|(j, d)| (d.to_string(), if j % 2 == 0 { x as f64 } else { y as f64 / 3.0 }))
                    .collect();
                (Prediction::Text("t".into()), Gold::Judged, Some(scores))
            }
        };
        TaskResult { bundle_id: format!("b{i}"), family, sub_task: sub, prediction, gold, judge }
    })
}

proptest! {
    #[test]
    fn recall_is_monotone_in_k(pred in proptest::collection::vec(0u8..12, 0..15), gold in proptest::collection::btree_set(0u8..12, 1..6), k in 1usize..16) {
        let a = recall_at_k(&pred, &gold, k).unwrap();
        let b = recall_at_k(&pred, &gold, k + 1).unwrap();
        prop_assert!(a <= b);
        prop_assert!((0.0..=1.0).contains(&a));
    }

    #[test]
    fn exact_match_is_symmetric_and_idempotent(a in arb_answer(), b in arb_answer()) {
        prop_assert_eq!(exact_match(&a, &b), exact_match(&b, &a));
        let n = normalize_answer(&a);
        prop_assert_eq!(normalize_answer(&n), n.clone());
        prop_assert_eq!(exact_match(&a, &n), 100.0);
    }

    #[test]
    fn macro_report_is_permutation_invariant(
        (results, perm) in (1usize..40).prop_flat_map(|n| {
            ((0..n).map(arb_result).collect::<Vec<_>>(), Just((0..n).collect::<Vec<_>>()).prop_shuffle())
        })
    ) {
        let cfg = ReportConfig::default();
        let a = macro_report(&results, &cfg).unwrap();
        let shuffled: Vec<TaskResult> = perm.iter().map(|&i| results[i].clone()).collect();
        let b = macro_report(&shuffled, &cfg).unwrap();
        // Bitwise, not approximately.
        prop_assert_eq!(a.overall.map(f64::to_bits), b.overall.map(f64::to_bits));
        prop_assert_eq!(a, b);
    }
}

#[test]
fn recall_counts_duplicates_once_and_only_in_the_window() {
    let gold: BTreeSet<&str> = ["a", "b"].into();
    assert_eq!(recall_at_k(&["a", "a", "b"], &gold, 2).unwrap(), 0.5);
    assert_eq!(recall_at_k(&["a", "a", "b"], &gold, 3).unwrap(), 1.0);
    assert!(recall_at_k(&["a"], &BTreeSet::new(), 1).is_err());
    assert!(recall_at_k(&["a"], &gold, 0).is_err());
}

#[test]
fn exact_match_normalisation() {
    assert_eq!(exact_match("  The Answer. ", "the answer"), 100.0);
    assert_eq!(exact_match("3.0", "3"), 0.0);
    assert_eq!(exact_match("a  b", "a b"), 100.0);
}

#[test]
fn judge_aggregation_by_hand() {
    let s: JudgeScores = [("fluency", 80.0), ("relevance", 70.0), ("accuracy", 60.0), ("creativity", 50.0), ("overall_quality", 90.0)]
        .into_iter()
        .map(|(k, v)| (k.to_string(), v))
        .collect();
    assert_eq!(aggregate_judge_scores(&s, JudgeScheme::SummaryFiveDims).unwrap(), 70.0);
    let two: JudgeScores = [("analysis".to_string(), 55.0), ("technical".to_string(), 40.0)].into();
    assert_eq!(aggregate_judge_scores(&two, JudgeScheme::SolutionTwoScores).unwrap(), 47.5);
    let mut bad = two.clone();
    bad.insert("technical".into(), 101.0);
    assert!(aggregate_judge_scores(&bad, JudgeScheme::SolutionTwoScores).is_err());
    bad.remove("technical");
    assert!(aggregate_judge_scores(&bad, JudgeScheme::SolutionTwoScores).is_err());
}
