//! Objective scorers and macro-averaged reports.
//!
//! Topic induction is scored with Recall@K, reasoning with exact match, and
//! summary and solution tasks with externally produced judge scores. All
//! scores are on a 0..=100 scale.

use alloc::collections::{BTreeMap, BTreeSet};
use alloc::string::String;
use alloc::vec::Vec;

use serde::{Deserialize, Serialize};

use crate::taskgen::{SubTask, TaskFamily};

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum MetricsError {
    #[error("gold set is empty")]
    EmptyGold,
    #[error("K must be at least 1")]
    ZeroK,
    #[error("judge score `{0}` is missing")]
    MissingDimension(String),
    #[error("judge score `{dimension}` = {value} is outside [0, 100]")]
    OutOfRange { dimension: String, value: f64 },
    #[error("result `{0}`: prediction or gold does not fit its task family")]
    PayloadMismatch(String),
    #[error("result `{bundle_id}`: sub-task {sub_task:?} is not in family {family:?}")]
    FamilyMismatch {
        bundle_id: String,
        family: TaskFamily,
        sub_task: SubTask,
    },
    #[error("family weights must be finite, non-negative and not all zero")]
    InvalidWeights,
}

/// Share of `gold` found among the first `k` predictions, duplicates counted
/// once.
pub fn recall_at_k<S: Ord>(predicted: &[S], gold: &BTreeSet<S>, k: usize) -> Result<f64, MetricsError> {
    if k == 0 {
        return Err(MetricsError::ZeroK);
    }
    if gold.is_empty() {
        return Err(MetricsError::EmptyGold);
    }
    let hits: BTreeSet<&S> = predicted.iter().take(k).filter(|p| gold.contains(*p)).collect();
    Ok(hits.len() as f64 / gold.len() as f64)
}

const TERMINAL_PUNCTUATION: [char; 8] = ['.', ',', '!', '?', ';', ':', '。', '！'];

/// Lowercase, single-spaced, trimmed, without trailing punctuation. Numbers
/// are compared as text.
pub fn normalize_answer(s: &str) -> String {
    let mut out = String::with_capacity(s.len());
    for word in s.split_whitespace() {
        if !out.is_empty() {
            out.push(' ');
        }
        out.extend(word.chars().flat_map(char::to_lowercase));
    }
    let kept = out
        .trim_end_matches(|c: char| TERMINAL_PUNCTUATION.contains(&c) || c.is_whitespace())
        .len();
    out.truncate(kept);
    out
}

/// 100 on a normalised match, else 0.
pub fn exact_match(prediction: &str, gold: &str) -> f64 {
    if normalize_answer(prediction) == normalize_answer(gold) {
        100.0
    } else {
        0.0
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum JudgeScheme {
    SummaryFiveDims,
    SolutionTwoScores,
}

impl JudgeScheme {
    pub fn dimensions(self) -> &'static [&'static str] {
        match self {
            JudgeScheme::SummaryFiveDims => &["fluency", "relevance", "accuracy", "creativity", "overall_quality"],
            JudgeScheme::SolutionTwoScores => &["analysis", "technical"],
        }
    }

    pub fn for_family(family: TaskFamily) -> Option<JudgeScheme> {
        match family {
            TaskFamily::Summary => Some(JudgeScheme::SummaryFiveDims),
            TaskFamily::Solution => Some(JudgeScheme::SolutionTwoScores),
            _ => None,
        }
    }
}

pub type JudgeScores = BTreeMap<String, f64>;

/// Equal-weight mean of the scheme's dimensions.
pub fn aggregate_judge_scores(scores: &JudgeScores, scheme: JudgeScheme) -> Result<f64, MetricsError> {
    let dims = scheme.dimensions();
    let mut sum = 0.0;
    for d in dims {
        let v = *scores.get(*d).ok_or_else(|| MetricsError::MissingDimension((*d).into()))?;
        if !(0.0..=100.0).contains(&v) {
            return Err(MetricsError::OutOfRange {
                dimension: (*d).into(),
                value: v,
            });
        }
        sum += v;
    }
    Ok(sum / dims.len() as f64)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Prediction {
    Ranked(Vec<String>),
    Answer(String),
    Text(String),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Gold {
    Docs(Vec<String>),
    Answer(String),
    /// Judged tasks carry no machine-checkable gold.
    Judged,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TaskResult {
    pub bundle_id: String,
    pub family: TaskFamily,
    pub sub_task: SubTask,
    pub prediction: Prediction,
    pub gold: Gold,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub judge: Option<JudgeScores>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReportConfig {
    pub recall_k: usize,
    /// Reasoning, topic induction, summary, solution.
    pub family_weights: [f64; 4],
}

impl Default for ReportConfig {
    fn default() -> Self {
        ReportConfig {
            recall_k: 10,
            family_weights: [1.0; 4],
        }
    }
}

/// Score of one result on the 0..=100 scale.
pub fn score_result(r: &TaskResult, cfg: &ReportConfig) -> Result<f64, MetricsError> {
    if r.sub_task.family() != r.family {
        return Err(MetricsError::FamilyMismatch {
            bundle_id: r.bundle_id.clone(),
            family: r.family,
            sub_task: r.sub_task,
        });
    }
    let mismatch = || MetricsError::PayloadMismatch(r.bundle_id.clone());
    match (r.family, &r.prediction, &r.gold) {
        (TaskFamily::TopicInduction, Prediction::Ranked(p), Gold::Docs(g)) => {
            let gold: BTreeSet<&String> = g.iter().collect();
            let pred: Vec<&String> = p.iter().collect();
            Ok(100.0 * recall_at_k(&pred, &gold, cfg.recall_k)?)
        }
        (TaskFamily::Reasoning, Prediction::Answer(p), Gold::Answer(g)) => Ok(exact_match(p, g)),
        (TaskFamily::Summary | TaskFamily::Solution, Prediction::Text(_), _) => {
            let scheme = JudgeScheme::for_family(r.family).expect("judged family");
            let scores = r.judge.as_ref().ok_or_else(|| MetricsError::MissingDimension(scheme.dimensions()[0].into()))?;
            aggregate_judge_scores(scores, scheme)
        }
        _ => Err(mismatch()),
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SubTaskScore {
    pub sub_task: SubTask,
    pub family: TaskFamily,
    pub count: usize,
    pub mean: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FamilyScore {
    pub family: TaskFamily,
    /// Mean of the family's sub-task means; `None` when no results.
    pub mean: Option<f64>,
    pub weight: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MacroReport {
    pub sub_tasks: Vec<SubTaskScore>,
    /// Reasoning, topic induction, summary, solution.
    pub families: Vec<FamilyScore>,
    /// Weighted mean over present families, weights renormalised.
    pub overall: Option<f64>,
    pub recall_k: usize,
}

/// Order-independent mean: values are summed in sorted order.
fn stable_mean(values: &mut [f64]) -> f64 {
    values.sort_by(f64::total_cmp);
    values.iter().sum::<f64>() / values.len() as f64
}

/// Weighted mean of the present family scores.
pub fn overall_score(families: &[Option<f64>; 4], weights: &[f64; 4]) -> Result<Option<f64>, MetricsError> {
    if weights.iter().any(|w| !w.is_finite() || *w < 0.0) || weights.iter().all(|w| *w == 0.0) {
        return Err(MetricsError::InvalidWeights);
    }
    let (mut num, mut den) = (0.0, 0.0);
    for (s, w) in families.iter().zip(weights) {
        if let Some(s) = s {
            num += w * s;
            den += w;
        }
    }
    Ok((den > 0.0).then(|| num / den))
}

pub fn macro_report(results: &[TaskResult], cfg: &ReportConfig) -> Result<MacroReport, MetricsError> {
    let mut per_sub: BTreeMap<SubTask, Vec<f64>> = BTreeMap::new();
    for r in results {
        per_sub.entry(r.sub_task).or_default().push(score_result(r, cfg)?);
    }
    let sub_tasks: Vec<SubTaskScore> = SubTask::ALL
        .iter()
        .filter_map(|s| {
            let v = per_sub.get_mut(s)?;
            Some(SubTaskScore {
                sub_task: *s,
                family: s.family(),
                count: v.len(),
                mean: stable_mean(v),
            })
        })
        .collect();

    let mut fam_means = [None; 4];
    for (i, f) in TaskFamily::ALL.iter().enumerate() {
        let mut means: Vec<f64> = sub_tasks.iter().filter(|s| s.family == *f).map(|s| s.mean).collect();
        if !means.is_empty() {
            fam_means[i] = Some(stable_mean(&mut means));
        }
    }
    let overall = overall_score(&fam_means, &cfg.family_weights)?;
    Ok(MacroReport {
        sub_tasks,
        families: TaskFamily::ALL
            .iter()
            .enumerate()
            .map(|(i, f)| FamilyScore {
                family: *f,
                mean: fam_means[i],
                weight: cfg.family_weights[i],
            })
            .collect(),
        overall,
        recall_k: cfg.recall_k,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn recall_examples() {
        let gold = BTreeSet::from(["a", "c"]);
        assert_eq!(recall_at_k(&["a", "b", "c"], &gold, 2), Ok(0.5));
        assert_eq!(recall_at_k(&["c", "a"], &gold, 2), Ok(1.0));
        assert_eq!(recall_at_k(&["a", "a", "a"], &gold, 3), Ok(0.5));
        assert_eq!(recall_at_k(&["a"], &BTreeSet::new(), 1), Err(MetricsError::EmptyGold));
        assert_eq!(recall_at_k(&["a"], &gold, 0), Err(MetricsError::ZeroK));
    }

    #[test]
    fn em_examples() {
        assert_eq!(exact_match("  YES.", "yes"), 100.0);
        assert_eq!(exact_match("0.42", "0.420"), 0.0);
        assert_eq!(exact_match("Graph   Neural\tNets!", "graph neural nets"), 100.0);
        assert_eq!(exact_match("50%", "50"), 0.0);
    }

    #[test]
    fn judge_examples() {
        let five: JudgeScores = JudgeScheme::SummaryFiveDims.dimensions().iter().map(|d| ((*d).into(), 50.0)).collect();
        assert_eq!(aggregate_judge_scores(&five, JudgeScheme::SummaryFiveDims), Ok(50.0));
        let two = JudgeScores::from([("analysis".into(), 79.0), ("technical".into(), 35.0)]);
        assert_eq!(aggregate_judge_scores(&two, JudgeScheme::SolutionTwoScores), Ok(57.0));
        assert_eq!(
            aggregate_judge_scores(&two, JudgeScheme::SummaryFiveDims),
            Err(MetricsError::MissingDimension("fluency".into()))
        );
    }

    #[test]
    fn overall_equal_weights() {
        let o = overall_score(&[Some(36.0), Some(20.0), Some(53.74), Some(48.28)], &[1.0; 4]).unwrap().unwrap();
        assert!((o - 39.505).abs() < 1e-9);
        let partial = overall_score(&[Some(30.0), None, Some(50.0), None], &[1.0; 4]).unwrap();
        assert_eq!(partial, Some(40.0));
        assert_eq!(overall_score(&[None; 4], &[0.0; 4]), Err(MetricsError::InvalidWeights));
    }

    #[test]
    fn single_result_report() {
        let r = TaskResult {
            bundle_id: "b".into(),
            family: TaskFamily::Reasoning,
            sub_task: SubTask::FormulaReasoning,
            prediction: Prediction::Answer("x".into()),
            gold: Gold::Answer("X".into()),
            judge: None,
        };
        let rep = macro_report(&[r], &ReportConfig::default()).unwrap();
        assert_eq!(rep.sub_tasks[0].mean, 100.0);
        assert_eq!(rep.families[0].mean, Some(100.0));
        assert_eq!(rep.overall, Some(100.0));
    }
}
