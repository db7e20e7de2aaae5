//! Machine-readable analysis reports and the orchestration that fills them.
//!
//! A report carries everything needed to reproduce a figure: scores, CD
//! values, test results, cliques, and a full echo of the configuration.
//! Reports contain no timestamps or host information, so identical inputs
//! serialize byte-identically.

use serde::{Deserialize, Serialize};

use crate::classic::{
    friedman_test, nemenyi_cd, pairwise_wilcoxon_holm, rejection_matrix, PairwiseResult,
};
use crate::diagram::{cliques_from_pairs, cliques_from_threshold, CliqueSet, CliqueSource};
use crate::dist::Alpha;
use crate::error::{Error, Result};
use crate::mars::{mars_cd, mars_scores, permutation_test, weighted_rank_sigma, SigmaMode};
use crate::matrix::{orient, Direction, PerformanceMatrix};
use crate::ranks::{average_ranks, RankMatrix};

/// Which pipelines an analysis ran.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Mode {
    Standard,
    Mars,
    Both,
}

impl Mode {
    pub fn runs_standard(self) -> bool {
        matches!(self, Mode::Standard | Mode::Both)
    }

    pub fn runs_mars(self) -> bool {
        matches!(self, Mode::Mars | Mode::Both)
    }
}

/// One global test entry; `complementary` marks tests that inform but never
/// gate the pairwise section.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GlobalTest {
    pub name: String,
    pub statistic: f64,
    pub p_value: f64,
    pub reject: bool,
    pub complementary: bool,
}

/// Configuration echo so a report alone reproduces its figures.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReportConfig {
    pub direction: Direction,
    pub sigma_mode: SigmaMode,
    pub clique_source: CliqueSource,
    pub rho: u32,
    pub seed: u64,
}

/// Full analysis record. Fields belonging to a pipeline that did not run
/// are absent from the serialized form, never null-filled.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AnalysisReport {
    pub tool_version: String,
    pub mode: Mode,
    pub alpha: f64,
    pub k: usize,
    pub n_datasets: usize,
    pub method_names: Vec<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub avg_ranks: Option<Vec<f64>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub mars_scores: Option<Vec<f64>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub cd_standard: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub cd_mars: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub mars_sigma: Option<f64>,
    pub global_tests: Vec<GlobalTest>,
    /// Shared between pipelines in `both` mode; absent when the standard
    /// pipeline alone ran and its Friedman gate stopped the post-hoc stage.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub pairwise: Option<Vec<PairwiseResult>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub standard_posthoc_skipped: Option<bool>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub cliques_standard: Option<CliqueSet>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub cliques_mars: Option<CliqueSet>,
    pub config: ReportConfig,
}

/// Knobs for [`analyze`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AnalyzeOptions {
    pub mode: Mode,
    pub alpha: Alpha,
    pub rho: u32,
    pub seed: u64,
    pub sigma_mode: SigmaMode,
    /// Clique rule for the MARS diagram.
    pub clique_source: CliqueSource,
    /// Clique rule for the standard diagram.
    pub standard_clique_source: CliqueSource,
    /// Run standard post-hoc tests only when Friedman rejects.
    pub friedman_gate: bool,
}

impl Default for AnalyzeOptions {
    fn default() -> Self {
        AnalyzeOptions {
            mode: Mode::Both,
            alpha: Alpha::new(0.05).expect("0.05 lies in (0, 1)"),
            rho: 10_000,
            seed: 42,
            sigma_mode: SigmaMode::Pooled,
            clique_source: CliqueSource::CriticalDifference,
            standard_clique_source: CliqueSource::Holm,
            friedman_gate: true,
        }
    }
}

/// Run the requested pipelines over one matrix, computing the pairwise
/// Wilcoxon-Holm tests once and sharing them between both.
pub fn analyze(matrix: &PerformanceMatrix, options: &AnalyzeOptions) -> Result<AnalysisReport> {
    let original_direction = matrix.direction();
    let m = orient(matrix);
    let k = m.n_methods();
    let n = m.n_datasets();
    let alpha = options.alpha;

    let mut report = AnalysisReport {
        tool_version: env!("CARGO_PKG_VERSION").to_owned(),
        mode: options.mode,
        alpha: alpha.value(),
        k,
        n_datasets: n,
        method_names: m.method_names().to_vec(),
        avg_ranks: None,
        mars_scores: None,
        cd_standard: None,
        cd_mars: None,
        mars_sigma: None,
        global_tests: Vec::new(),
        pairwise: None,
        standard_posthoc_skipped: None,
        cliques_standard: None,
        cliques_mars: None,
        config: ReportConfig {
            direction: original_direction,
            sigma_mode: options.sigma_mode,
            clique_source: options.clique_source,
            rho: options.rho,
            seed: options.seed,
        },
    };

    let friedman = if options.mode.runs_standard() {
        let avg = average_ranks(&RankMatrix::from_matrix(&m));
        let f = friedman_test(&avg, n, alpha)?;
        report.cd_standard = Some(nemenyi_cd(k, n, alpha)?);
        report.avg_ranks = Some(avg);
        report.global_tests.push(GlobalTest {
            name: "friedman".into(),
            statistic: f.statistic,
            p_value: f.p_value,
            reject: f.reject,
            complementary: false,
        });
        Some(f)
    } else {
        None
    };

    let standard_posthoc = friedman
        .as_ref()
        .map(|f| f.reject || !options.friedman_gate);
    let need_pairs = options.mode.runs_mars() || standard_posthoc == Some(true);
    let pairwise = need_pairs.then(|| pairwise_wilcoxon_holm(&m, alpha));

    if let Some(run) = standard_posthoc {
        let avg = report.avg_ranks.as_ref().expect("standard ranks computed");
        report.standard_posthoc_skipped = Some(!run);
        report.cliques_standard = Some(if run {
            let pairs = pairwise.as_ref().expect("pairwise computed for post-hoc");
            match options.standard_clique_source {
                CliqueSource::Holm => cliques_from_pairs(&rejection_matrix(k, pairs), avg),
                CliqueSource::CriticalDifference => {
                    cliques_from_threshold(avg, report.cd_standard.expect("cd computed"))
                }
            }
        } else {
            CliqueSet::single_clique(avg)
        });
    }

    if options.mode.runs_mars() {
        let (weighted, scores) = mars_scores(&m);
        let sigma = weighted_rank_sigma(&weighted, options.sigma_mode);
        let cd = mars_cd(&weighted, alpha, options.sigma_mode)?;
        let perm = permutation_test(&m, options.rho, options.seed);
        report.global_tests.push(GlobalTest {
            name: "permutation".into(),
            statistic: perm.observed_statistic,
            p_value: perm.p_value,
            reject: perm.p_value < alpha.value(),
            complementary: true,
        });
        let pairs = pairwise.as_ref().expect("pairwise computed for mars");
        report.cliques_mars = Some(match options.clique_source {
            CliqueSource::CriticalDifference => cliques_from_threshold(&scores, cd),
            CliqueSource::Holm => cliques_from_pairs(&rejection_matrix(k, pairs), &scores),
        });
        report.mars_scores = Some(scores);
        report.mars_sigma = Some(sigma);
        report.cd_mars = Some(cd);
    }

    report.pairwise = pairwise;
    Ok(report)
}

impl AnalysisReport {
    pub fn to_json(&self) -> String {
        let mut text =
            serde_json::to_string_pretty(self).expect("report serialization cannot fail");
        text.push('\n');
        text
    }

    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| Error::MalformedInput(format!("invalid report: {e}")))
    }
}
