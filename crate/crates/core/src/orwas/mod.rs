//! Random-walk article selection.
//!
//! Walks start from papers and from high-frequency key-information nodes,
//! lean toward high-frequency nodes when leaving a paper, and record which
//! papers were seen together with which of their key-information nodes. Paper
//! sets that co-visit a shared node are enumerated under hard caps and ranked.
//!
//! Every walk draws from its own random stream keyed by its index, so a run
//! is reproducible from `(graph, seed, configs)` no matter how the walk index
//! range is split across workers.

pub mod aggregate;
pub mod enumerate;
pub mod hf;
pub mod score;
pub mod walk;

use alloc::vec::Vec;

use serde::{Deserialize, Serialize};

use crate::graph::FrozenGraph;

pub use aggregate::{aggregate, PairAggregate, PairCount, SlotCounts};
pub use enumerate::{enumerate_combinations, CandidateCombination, Enumeration};
pub use hf::{compute_high_frequency_set, DEFAULT_QUANTILE};
pub use score::{quality_score, rank_combinations, score_combination, ScoreBreakdown, ScoreWeights, ScoringContext};
pub use walk::{random_walk, run_walks, stratified_starts, walk_rng, Path, WalkStats};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum OrwasError {
    #[error("invalid configuration: {0}")]
    InvalidConfig(&'static str),
    #[error("graph has no articles to start walks from")]
    NoArticles,
    #[error("aggregate pair ({0}, {1}) is not an (article, key-information) edge of the graph")]
    ForeignPair(u32, u32),
}

/// Conditions that do not stop a run but are reported.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "warning", rename_all = "snake_case")]
pub enum Warning {
    EmptyKeyInfo,
    /// All starts were drawn from articles.
    EmptyHighFrequency,
    ComboLargerThanPopulation { k: usize, articles: usize },
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct WalkConfig {
    pub walk_length: usize,
    pub num_walks: usize,
    pub bias: f64,
    pub article_start_fraction: f64,
    pub seed: u64,
}

impl Default for WalkConfig {
    fn default() -> Self {
        WalkConfig {
            walk_length: 100,
            num_walks: 10_000,
            bias: 0.3,
            article_start_fraction: 0.7,
            seed: 0,
        }
    }
}

impl WalkConfig {
    pub fn validate(&self) -> Result<(), OrwasError> {
        if self.walk_length == 0 || self.num_walks == 0 {
            return Err(OrwasError::InvalidConfig("walk_length and num_walks must be positive"));
        }
        if !(0.0..=1.0).contains(&self.bias) {
            return Err(OrwasError::InvalidConfig("bias must be in [0, 1]"));
        }
        if !(0.0..=1.0).contains(&self.article_start_fraction) {
            return Err(OrwasError::InvalidConfig("article_start_fraction must be in [0, 1]"));
        }
        Ok(())
    }

    /// floor(fraction * W); the remaining walks start in V_h.
    pub fn article_starts(&self) -> usize {
        let exact = self.article_start_fraction * self.num_walks as f64;
        (libm::floor(exact + 1e-9) as usize).min(self.num_walks)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SelectionConfig {
    pub combo_size: usize,
    pub max_combinations: usize,
    pub weights: ScoreWeights,
    /// Each anchor contributes subsets of at most this many of its best
    /// co-visited papers. `None` enumerates every subset.
    pub anchor_fanout: Option<usize>,
    /// Minimum per-pair visit count for a paper to join an anchor's pool.
    pub min_support: u32,
    /// Byte budget for the candidate store.
    pub max_candidate_memory: usize,
}

impl Default for SelectionConfig {
    fn default() -> Self {
        SelectionConfig {
            combo_size: 3,
            max_combinations: 10_000,
            weights: ScoreWeights::default(),
            anchor_fanout: None,
            min_support: 1,
            max_candidate_memory: 256 << 20,
        }
    }
}

impl SelectionConfig {
    /// Pipeline preset: one subset per anchor, built from its most visited
    /// papers, so the output tracks how much of the graph the walks reached.
    pub fn orwas() -> Self {
        let base = SelectionConfig::default();
        SelectionConfig {
            anchor_fanout: Some(base.combo_size),
            ..base
        }
    }

    pub fn validate(&self) -> Result<(), OrwasError> {
        if self.combo_size < 2 {
            return Err(OrwasError::InvalidConfig("combo_size must be at least 2"));
        }
        if self.max_combinations == 0 {
            return Err(OrwasError::InvalidConfig("max_combinations must be positive"));
        }
        if self.anchor_fanout.is_some_and(|f| f < self.combo_size) {
            return Err(OrwasError::InvalidConfig("anchor_fanout must be at least combo_size"));
        }
        if !self.weights.is_valid() {
            return Err(OrwasError::InvalidConfig("weights must be finite and non-negative"));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct RunReport {
    pub walks: WalkStats,
    pub pairs: usize,
    pub articles_in_aggregate: usize,
    pub candidates_seen: usize,
    pub unique_combinations: usize,
    pub evictions: usize,
    pub cap_reached: bool,
    pub quality_score: f64,
    pub warnings: Vec<Warning>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Selection {
    pub aggregate: PairAggregate,
    pub ranked: Vec<CandidateCombination>,
    pub report: RunReport,
}

/// Enumerates, scores and ranks candidates from an existing aggregate.
pub fn select_from_aggregate(
    graph: &FrozenGraph,
    agg: &PairAggregate,
    scfg: &SelectionConfig,
) -> Result<(Vec<CandidateCombination>, RunReport), OrwasError> {
    scfg.validate()?;
    agg.check_against(graph)?;
    let en = enumerate_combinations(agg, graph, scfg);
    let ranked = rank_combinations(en.combinations, graph, &scfg.weights);
    let report = RunReport {
        pairs: agg.len(),
        articles_in_aggregate: agg.num_articles(),
        candidates_seen: en.seen,
        unique_combinations: ranked.len(),
        evictions: en.evictions,
        cap_reached: en.cap_reached,
        quality_score: quality_score(&ranked),
        warnings: en.warnings,
        ..Default::default()
    };
    Ok((ranked, report))
}

/// Full single-threaded pipeline: starts, walks, aggregate, enumerate, rank.
/// `graph` must already carry its high-frequency set.
pub fn select_paper_sets(graph: &FrozenGraph, wcfg: &WalkConfig, scfg: &SelectionConfig) -> Result<Selection, OrwasError> {
    wcfg.validate()?;
    scfg.validate()?;
    let mut acc = SlotCounts::new(graph);
    let stats = run_walks(graph, wcfg, 0..wcfg.num_walks, &mut acc)?;
    let agg = acc.into_aggregate(graph);
    let (ranked, mut report) = select_from_aggregate(graph, &agg, scfg)?;
    if graph.keyinfo().is_empty() {
        report.warnings.insert(0, Warning::EmptyKeyInfo);
    }
    if graph.high_frequency().is_empty() {
        report.warnings.insert(0, Warning::EmptyHighFrequency);
    }
    report.walks = stats;
    Ok(Selection {
        aggregate: agg,
        ranked,
        report,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn article_share_is_floored() {
        let mut c = WalkConfig {
            num_walks: 10,
            ..Default::default()
        };
        assert_eq!(c.article_starts(), 7);
        c.num_walks = 10_000;
        assert_eq!(c.article_starts(), 7000);
        c.num_walks = 3;
        assert_eq!(c.article_starts(), 2);
    }

    #[test]
    fn config_validation() {
        assert!(WalkConfig::default().validate().is_ok());
        let bad = WalkConfig {
            bias: 1.5,
            ..Default::default()
        };
        assert!(bad.validate().is_err());
        assert!(SelectionConfig::default().validate().is_ok());
        assert!(SelectionConfig::orwas().validate().is_ok());
        let bad = SelectionConfig {
            combo_size: 1,
            ..Default::default()
        };
        assert!(bad.validate().is_err());
    }
}
