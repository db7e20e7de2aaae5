//! Rank statistics for benchmark comparisons.
//!
//! Two pipelines over an N-datasets x k-methods performance matrix:
//!
//! * the standard one — fractional ranks, Friedman omnibus test, Nemenyi
//!   critical difference, pairwise Wilcoxon signed-rank tests under Holm's
//!   step-down correction;
//! * MARS (magnitude-aware rank statistics) — ranks weighted by each
//!   method's margin over the worst performer, a critical difference
//!   rescaled to the weighted rank space, and a seeded permutation test.
//!
//! Both feed critical difference diagrams rendered as deterministic SVG.

pub mod classic;
pub mod diagram;
pub mod dist;
pub mod error;
pub mod mars;
pub mod matrix;
pub mod ranks;
pub mod report;
pub mod rng;
pub mod scenarios;

pub use classic::{
    classic_pipeline, ClassicAnalysis, ClassicOptions, FriedmanResult, PairwiseResult,
};
pub use diagram::{render_cd_diagram, CliqueSet, CliqueSource, DiagramOptions};
pub use dist::Alpha;
pub use error::{Error, Result};
pub use mars::{
    mars_pipeline, MarsAnalysis, MarsOptions, MarsScores, PermutationResult, SigmaMode,
    WeightedRankMatrix,
};
pub use matrix::{orient, parse_matrix, Direction, MatrixFormat, PerformanceMatrix};
pub use ranks::RankMatrix;
pub use report::{analyze, AnalysisReport, AnalyzeOptions, Mode};
pub use scenarios::{generate_scenario, ScenarioSpec};
