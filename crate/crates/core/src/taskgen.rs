//! Routing ranked paper sets to task families and emitting task bundles.
//!
//! A bundle carries everything an external question generator needs for
//! inverted construction: the answer-bearing evidence first, the remaining
//! shared evidence as question context, and the supporting papers. It never
//! contains generated text.
//!
//! Routing looks at the kinds of the shared nodes, first match wins:
//!
//! | rule | condition | sub-task |
//! |---|---|---|
//! | visual | figures + tables > half | ftc comparison if both present, else ftc reasoning |
//! | formula | formulas > half | formula reasoning |
//! | algorithm | algorithms > half | algorithm reasoning |
//! | topic | >= 5 papers, exactly one tag/background node shared by all | explicit (tag) / implicit (background) topic induction |
//! | summary | >= 4 papers, tags + methodology > half | trend (tags >= methodology) / method summary |
//! | fine | >= 4 papers, results + metrics + datasets > half | fine-grained summary |
//! | solution | background + limitations > half | solution generation |
//! | fallback | any figure/table/formula/algorithm shared | full-paper reasoning |
//! | fallback | otherwise | solution generation |

use alloc::collections::BTreeSet;
use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;

use serde::{Deserialize, Serialize};

use crate::graph::{KnowledgeGraph, NodeId, PaperId};
use crate::kind::{Modality, NodeKind};
use crate::orwas::CandidateCombination;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TaskFamily {
    Reasoning,
    TopicInduction,
    Summary,
    Solution,
}

impl TaskFamily {
    pub const ALL: [TaskFamily; 4] = [
        TaskFamily::Reasoning,
        TaskFamily::TopicInduction,
        TaskFamily::Summary,
        TaskFamily::Solution,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            TaskFamily::Reasoning => "reasoning",
            TaskFamily::TopicInduction => "topic_induction",
            TaskFamily::Summary => "summary",
            TaskFamily::Solution => "solution",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SubTask {
    FigureTableChartComparison,
    FigureTableChartReasoning,
    FormulaReasoning,
    AlgorithmReasoning,
    FullPaperReasoning,
    ImplicitTopicInduction,
    ExplicitTopicInduction,
    TrendSummary,
    MethodSummary,
    FineGrainedSummary,
    SolutionGeneration,
}

impl SubTask {
    pub const ALL: [SubTask; 11] = [
        SubTask::FigureTableChartComparison,
        SubTask::FigureTableChartReasoning,
        SubTask::FormulaReasoning,
        SubTask::AlgorithmReasoning,
        SubTask::FullPaperReasoning,
        SubTask::ImplicitTopicInduction,
        SubTask::ExplicitTopicInduction,
        SubTask::TrendSummary,
        SubTask::MethodSummary,
        SubTask::FineGrainedSummary,
        SubTask::SolutionGeneration,
    ];

    pub fn family(self) -> TaskFamily {
        use SubTask::*;
        match self {
            FigureTableChartComparison | FigureTableChartReasoning | FormulaReasoning | AlgorithmReasoning
            | FullPaperReasoning => TaskFamily::Reasoning,
            ImplicitTopicInduction | ExplicitTopicInduction => TaskFamily::TopicInduction,
            TrendSummary | MethodSummary | FineGrainedSummary => TaskFamily::Summary,
            SolutionGeneration => TaskFamily::Solution,
        }
    }

    pub fn as_str(self) -> &'static str {
        use SubTask::*;
        match self {
            FigureTableChartComparison => "figure_table_chart_comparison",
            FigureTableChartReasoning => "figure_table_chart_reasoning",
            FormulaReasoning => "formula_reasoning",
            AlgorithmReasoning => "algorithm_reasoning",
            FullPaperReasoning => "full_paper_reasoning",
            ImplicitTopicInduction => "implicit_topic_induction",
            ExplicitTopicInduction => "explicit_topic_induction",
            TrendSummary => "trend_summary",
            MethodSummary => "method_summary",
            FineGrainedSummary => "fine_grained_summary",
            SolutionGeneration => "solution_generation",
        }
    }

    /// Kinds whose shared nodes carry the answer for this sub-task.
    fn answer_kinds(self) -> &'static [NodeKind] {
        use NodeKind::*;
        use SubTask::*;
        match self {
            FigureTableChartComparison | FigureTableChartReasoning => &[Figures, Tables],
            FormulaReasoning => &[Formulas],
            AlgorithmReasoning => &[Algorithms],
            FullPaperReasoning => &[Figures, Tables, Formulas, Algorithms],
            ImplicitTopicInduction | ExplicitTopicInduction => &[ClassificationTags, ResearchBackground],
            TrendSummary | MethodSummary => &[ClassificationTags, Methodology],
            FineGrainedSummary => &[Results, Metrics, Datasets],
            SolutionGeneration => &[ResearchBackground, Limitations],
        }
    }
}

/// A key-information node shared inside a combination.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SharedNode {
    pub id: NodeId,
    pub kind: NodeKind,
    pub modality: Modality,
    /// How many of the combination's papers it is adjacent to.
    pub member_count: usize,
}

/// What routing and bundling need to know about a ranked combination.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ComboView {
    pub combo_id: String,
    pub papers: Vec<PaperId>,
    pub shared: Vec<SharedNode>,
    pub score: f64,
}

impl ComboView {
    /// Resolves paper ids and shared-node kinds from the graph.
    pub fn from_candidate(combo_id: impl Into<String>, c: &CandidateCombination, graph: &KnowledgeGraph) -> Self {
        let papers = c
            .papers
            .iter()
            .map(|p| graph.node(*p).map_or_else(|| PaperId::from(format!("{p}")), |n| n.origin.paper_id.clone()))
            .collect();
        let shared = c
            .shared_nodes
            .iter()
            .filter_map(|e| {
                let n = graph.node(*e)?;
                Some(SharedNode {
                    id: *e,
                    kind: n.kind,
                    modality: n.modality,
                    member_count: c.papers.iter().filter(|p| graph.has_edge(**p, *e)).count(),
                })
            })
            .collect();
        ComboView {
            combo_id: combo_id.into(),
            papers,
            shared,
            score: c.score,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TopicMode {
    /// Tag themes are explicit, background themes implicit.
    #[default]
    ByThemeKind,
    Explicit,
    Implicit,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RoutingConfig {
    pub topic_mode: TopicMode,
    pub topic_min_papers: usize,
    pub summary_min_papers: usize,
}

impl Default for RoutingConfig {
    fn default() -> Self {
        RoutingConfig {
            topic_mode: TopicMode::ByThemeKind,
            topic_min_papers: 5,
            summary_min_papers: 4,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct Route {
    pub family: TaskFamily,
    pub sub_task: SubTask,
    /// Name of the routing rule that fired.
    pub rule: &'static str,
}

fn route(sub_task: SubTask, rule: &'static str) -> Route {
    Route {
        family: sub_task.family(),
        sub_task,
        rule,
    }
}

pub fn route_task_family(combo: &ComboView, cfg: &RoutingConfig) -> Route {
    use NodeKind::*;
    let total = combo.shared.len();
    let count = |kinds: &[NodeKind]| combo.shared.iter().filter(|s| kinds.contains(&s.kind)).count();
    let dominant = |n: usize| total > 0 && 2 * n > total;
    let papers = combo.papers.len();

    let (figs, tabs) = (count(&[Figures]), count(&[Tables]));
    if dominant(figs + tabs) {
        return if figs > 0 && tabs > 0 {
            route(SubTask::FigureTableChartComparison, "visual")
        } else {
            route(SubTask::FigureTableChartReasoning, "visual")
        };
    }
    if dominant(count(&[Formulas])) {
        return route(SubTask::FormulaReasoning, "formula");
    }
    if dominant(count(&[Algorithms])) {
        return route(SubTask::AlgorithmReasoning, "algorithm");
    }

    if papers >= cfg.topic_min_papers {
        let themes: Vec<&SharedNode> = combo
            .shared
            .iter()
            .filter(|s| matches!(s.kind, ClassificationTags | ResearchBackground) && s.member_count == papers)
            .collect();
        if let [theme] = themes.as_slice() {
            let explicit = match cfg.topic_mode {
                TopicMode::ByThemeKind => theme.kind == ClassificationTags,
                TopicMode::Explicit => true,
                TopicMode::Implicit => false,
            };
            let sub = if explicit {
                SubTask::ExplicitTopicInduction
            } else {
                SubTask::ImplicitTopicInduction
            };
            return route(sub, "topic");
        }
    }

    if papers >= cfg.summary_min_papers {
        let (tags, methods) = (count(&[ClassificationTags]), count(&[Methodology]));
        if dominant(tags + methods) {
            let sub = if tags >= methods {
                SubTask::TrendSummary
            } else {
                SubTask::MethodSummary
            };
            return route(sub, "summary");
        }
        if dominant(count(&[Results, Metrics, Datasets])) {
            return route(SubTask::FineGrainedSummary, "fine");
        }
    }

    if dominant(count(&[ResearchBackground, Limitations])) {
        return route(SubTask::SolutionGeneration, "solution");
    }
    if combo.shared.iter().any(|s| s.modality.is_visual_or_symbolic()) {
        route(SubTask::FullPaperReasoning, "fallback")
    } else {
        route(SubTask::SolutionGeneration, "fallback")
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum TaskgenError {
    #[error("combination `{0}` shares no key-information nodes")]
    EmptyShared(String),
    #[error("sub-task {sub_task:?} does not belong to family {family:?}")]
    FamilyMismatch { family: TaskFamily, sub_task: SubTask },
    #[error("reasoning bundle for `{0}` has no visual or symbolic evidence")]
    MissingModalEvidence(String),
}

/// Generator-facing slots. Answer evidence comes first so questions can be
/// built backwards from known facts.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct QuestionSeed {
    pub theme: Option<NodeId>,
    pub answer_evidence: Vec<NodeId>,
    pub context_evidence: Vec<NodeId>,
}

/// Set by external review tooling.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct BundleStatus {
    pub difficulty_screened: bool,
    pub human_verified: bool,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TaskBundle {
    pub bundle_id: String,
    pub family: TaskFamily,
    pub sub_task: SubTask,
    pub papers: Vec<PaperId>,
    pub shared_nodes: Vec<SharedNode>,
    pub modality_flags: BTreeSet<Modality>,
    pub question_seed: QuestionSeed,
    /// Id of the originating combination.
    pub provenance: String,
    pub status: BundleStatus,
}

pub fn emit_bundle(combo: &ComboView, family: TaskFamily, sub_task: SubTask) -> Result<TaskBundle, TaskgenError> {
    if combo.shared.is_empty() {
        return Err(TaskgenError::EmptyShared(combo.combo_id.clone()));
    }
    if sub_task.family() != family {
        return Err(TaskgenError::FamilyMismatch { family, sub_task });
    }
    let modality_flags: BTreeSet<Modality> = combo.shared.iter().map(|s| s.modality).collect();
    if family == TaskFamily::Reasoning && !modality_flags.iter().any(|m| m.is_visual_or_symbolic()) {
        return Err(TaskgenError::MissingModalEvidence(combo.combo_id.clone()));
    }

    let mut ordered: Vec<&SharedNode> = combo.shared.iter().collect();
    ordered.sort_by(|a, b| b.member_count.cmp(&a.member_count).then(a.id.cmp(&b.id)));
    let wanted = sub_task.answer_kinds();
    let (answer, context): (Vec<&SharedNode>, Vec<&SharedNode>) = ordered.into_iter().partition(|s| wanted.contains(&s.kind));
    let theme = match family {
        TaskFamily::TopicInduction | TaskFamily::Summary => answer.first().map(|s| s.id),
        _ => None,
    };

    Ok(TaskBundle {
        bundle_id: format!("{}:{}", combo.combo_id, sub_task.as_str()),
        family,
        sub_task,
        papers: combo.papers.clone(),
        shared_nodes: combo.shared.clone(),
        modality_flags,
        question_seed: QuestionSeed {
            theme,
            answer_evidence: answer.iter().map(|s| s.id).collect(),
            context_evidence: context.iter().map(|s| s.id).collect(),
        },
        provenance: combo.combo_id.clone(),
        status: BundleStatus::default(),
    })
}

/// Routes and bundles every combination; combinations that cannot form a
/// bundle are returned with their error.
pub fn bundle_all(combos: &[ComboView], cfg: &RoutingConfig) -> (Vec<TaskBundle>, Vec<TaskgenError>) {
    let mut bundles = Vec::new();
    let mut errors = Vec::new();
    for c in combos {
        let r = route_task_family(c, cfg);
        match emit_bundle(c, r.family, r.sub_task) {
            Ok(b) => bundles.push(b),
            Err(e) => errors.push(e),
        }
    }
    (bundles, errors)
}

/// Supporting-document buckets: 1, 2, 3, 4, 5+.
pub const DOC_BUCKETS: [&str; 5] = ["1", "2", "3", "4", "5+"];

pub fn doc_bucket(num_papers: usize) -> usize {
    num_papers.clamp(1, 5) - 1
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BenchmarkShape {
    pub total: usize,
    /// One entry per sub-task, in [`SubTask::ALL`] order.
    pub sub_task_targets: Vec<(SubTask, usize)>,
    /// Indexed like [`DOC_BUCKETS`].
    pub doc_count_targets: [usize; 5],
    /// Allowed relative deviation per row; 0 demands exact counts.
    pub tolerance: f64,
}

impl BenchmarkShape {
    /// 2400 items: 200 per sub-task, 400 for solution generation; supporting
    /// documents 200 / 200 / 400 / 200 / 1400.
    pub fn published() -> Self {
        BenchmarkShape {
            total: 2400,
            sub_task_targets: SubTask::ALL
                .iter()
                .map(|&s| (s, if s == SubTask::SolutionGeneration { 400 } else { 200 }))
                .collect(),
            doc_count_targets: [200, 200, 400, 200, 1400],
            tolerance: 0.0,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ShapeRow {
    pub name: String,
    pub target: usize,
    pub actual: usize,
    /// target - actual; positive means missing items.
    pub deficit: i64,
    pub ok: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ShapeReport {
    /// Sub-task targets and document-count targets both sum to `total`.
    pub targets_consistent: bool,
    pub sub_tasks: Vec<ShapeRow>,
    pub doc_counts: Vec<ShapeRow>,
    pub pass: bool,
}

fn row(name: &str, target: usize, actual: usize, tol: f64) -> ShapeRow {
    let deficit = target as i64 - actual as i64;
    ShapeRow {
        name: name.into(),
        target,
        actual,
        deficit,
        ok: (deficit.unsigned_abs() as f64) <= tol * target as f64,
    }
}

/// Counts per sub-task and per supporting-document bucket.
pub fn shape_counts(bundles: &[TaskBundle]) -> ([usize; 11], [usize; 5]) {
    let mut subs = [0usize; 11];
    let mut docs = [0usize; 5];
    for b in bundles {
        let i = SubTask::ALL.iter().position(|s| *s == b.sub_task).expect("ALL lists every sub-task");
        subs[i] += 1;
        docs[doc_bucket(b.papers.len())] += 1;
    }
    (subs, docs)
}

pub fn validate_benchmark_shape(bundles: &[TaskBundle], shape: &BenchmarkShape) -> ShapeReport {
    let (subs, docs) = shape_counts(bundles);
    let sub_sum: usize = shape.sub_task_targets.iter().map(|(_, n)| n).sum();
    let doc_sum: usize = shape.doc_count_targets.iter().sum();
    let targets_consistent = sub_sum == shape.total && doc_sum == shape.total;

    let sub_tasks: Vec<ShapeRow> = SubTask::ALL
        .iter()
        .enumerate()
        .map(|(i, s)| {
            let target = shape.sub_task_targets.iter().find(|(t, _)| t == s).map_or(0, |(_, n)| *n);
            row(s.as_str(), target, subs[i], shape.tolerance)
        })
        .collect();
    let doc_counts: Vec<ShapeRow> = DOC_BUCKETS
        .iter()
        .enumerate()
        .map(|(i, name)| row(name, shape.doc_count_targets[i], docs[i], shape.tolerance))
        .collect();
    let pass = targets_consistent && sub_tasks.iter().chain(&doc_counts).all(|r| r.ok);
    ShapeReport {
        targets_consistent,
        sub_tasks,
        doc_counts,
        pass,
    }
}
