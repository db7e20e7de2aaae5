//! The standard comparison pipeline: fractional ranks, Friedman omnibus
//! test, Nemenyi critical difference, and pairwise Wilcoxon signed-rank
//! tests under Holm's step-down correction.

use serde::{Deserialize, Serialize};

use crate::diagram::{cliques_from_pairs, cliques_from_threshold, CliqueSet, CliqueSource};
use crate::dist::{chi2_sf, nemenyi_q, normal_sf, Alpha};
use crate::error::{Error, Result};
use crate::matrix::{orient, PerformanceMatrix};
use crate::ranks::{average_ranks, rank_row, RankMatrix};

/// Outcome of the Friedman omnibus test.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FriedmanResult {
    pub statistic: f64,
    pub df: usize,
    pub p_value: f64,
    pub reject: bool,
}

/// One pairwise Wilcoxon test with its Holm decision.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PairwiseResult {
    pub method_a: usize,
    pub method_b: usize,
    pub p_raw: f64,
    pub holm_rank: usize,
    pub holm_threshold: f64,
    pub rejected: bool,
}

/// Friedman statistic over the average ranks:
/// chi2_F = 12N / (k(k+1)) * (sum R_j^2 - k(k+1)^2 / 4), df = k - 1.
pub fn friedman_test(avg_ranks: &[f64], n_datasets: usize, alpha: Alpha) -> Result<FriedmanResult> {
    let k = avg_ranks.len();
    if k < 2 {
        return Err(Error::DegenerateInput(format!(
            "Friedman test needs at least 2 methods, got {k}"
        )));
    }
    let kf = k as f64;
    let sum_sq: f64 = avg_ranks.iter().map(|r| r * r).sum();
    let centering = kf * (kf + 1.0) * (kf + 1.0) / 4.0;
    // Nonnegative analytically; clamp away rounding residue.
    let statistic = (12.0 * n_datasets as f64 / (kf * (kf + 1.0)) * (sum_sq - centering)).max(0.0);
    let p_value = chi2_sf(statistic, k - 1)?;
    Ok(FriedmanResult {
        statistic,
        df: k - 1,
        p_value,
        reject: p_value < alpha.value(),
    })
}

/// Nemenyi critical difference: CD = q_{alpha,k} * sqrt(k(k+1) / (6N)).
pub fn nemenyi_cd(k: usize, n_datasets: usize, alpha: Alpha) -> Result<f64> {
    let kf = k as f64;
    Ok(nemenyi_q(k, alpha)? * (kf * (kf + 1.0) / (6.0 * n_datasets as f64)).sqrt())
}

/// Two-sided Wilcoxon signed-rank p-value via the normal approximation.
///
/// Conventions: zero differences are dropped; tied |d| receive mean ranks;
/// the variance subtracts the tie correction sum(t^3 - t)/48; a continuity
/// correction of 0.5 moves W+ toward its mean. When every difference is
/// zero the test carries no evidence and returns p = 1.0.
pub fn wilcoxon_signed_rank(a: &[f64], b: &[f64]) -> f64 {
    assert_eq!(a.len(), b.len(), "paired samples must have equal length");
    let diffs: Vec<f64> = a
        .iter()
        .zip(b)
        .map(|(x, y)| x - y)
        .filter(|d| *d != 0.0)
        .collect();
    if diffs.is_empty() {
        return 1.0;
    }
    let n = diffs.len() as f64;

    // Ascending ranks of |d|: reuse the descending ranker on negated values.
    let neg_abs: Vec<f64> = diffs.iter().map(|d| -d.abs()).collect();
    let ranks = rank_row(&neg_abs);

    let w_plus: f64 = diffs
        .iter()
        .zip(&ranks)
        .filter(|(d, _)| **d > 0.0)
        .map(|(_, r)| r)
        .sum();

    let mean = n * (n + 1.0) / 4.0;
    let tie_sum: f64 = tie_group_sizes(&neg_abs)
        .into_iter()
        .map(|t| {
            let t = t as f64;
            t * t * t - t
        })
        .sum();
    let variance = n * (n + 1.0) * (2.0 * n + 1.0) / 24.0 - tie_sum / 48.0;
    let sigma = variance.sqrt();

    let z = if w_plus > mean {
        (w_plus - 0.5 - mean) / sigma
    } else if w_plus < mean {
        (w_plus + 0.5 - mean) / sigma
    } else {
        0.0
    };
    (2.0 * normal_sf(z.abs())).min(1.0)
}

fn tie_group_sizes(values: &[f64]) -> Vec<usize> {
    let mut sorted = values.to_vec();
    sorted.sort_by(f64::total_cmp);
    let mut sizes = Vec::new();
    let mut start = 0;
    while start < sorted.len() {
        let mut end = start;
        while end + 1 < sorted.len() && sorted[end + 1] == sorted[start] {
            end += 1;
        }
        sizes.push(end - start + 1);
        start = end + 1;
    }
    sizes
}

/// Holm step-down decision for one p-value, reported in input order.
#[derive(Debug, Clone, PartialEq)]
pub struct HolmDecision {
    pub p_raw: f64,
    pub holm_rank: usize,
    pub holm_threshold: f64,
    pub rejected: bool,
}

/// Holm's step-down procedure: the i-th smallest p-value is compared to
/// alpha / (m - i + 1); rejection stops at the first failure and every
/// later hypothesis is retained.
pub fn holm_adjust(p_values: &[f64], alpha: Alpha) -> Vec<HolmDecision> {
    let m = p_values.len();
    let mut order: Vec<usize> = (0..m).collect();
    // Stable sort: equal p-values keep input order.
    order.sort_by(|&a, &b| p_values[a].total_cmp(&p_values[b]));

    let mut out: Vec<Option<HolmDecision>> = vec![None; m];
    let mut rejecting = true;
    for (i, &idx) in order.iter().enumerate() {
        let threshold = alpha.value() / (m - i) as f64;
        let rejected = rejecting && p_values[idx] <= threshold;
        rejecting = rejected;
        out[idx] = Some(HolmDecision {
            p_raw: p_values[idx],
            holm_rank: i + 1,
            holm_threshold: threshold,
            rejected,
        });
    }
    out.into_iter().map(Option::unwrap).collect()
}

/// All k(k-1)/2 Wilcoxon tests with Holm decisions, pairs in (a, b)
/// lexicographic order with a < b.
pub fn pairwise_wilcoxon_holm(matrix: &PerformanceMatrix, alpha: Alpha) -> Vec<PairwiseResult> {
    let k = matrix.n_methods();
    let column = |j: usize| -> Vec<f64> { matrix.values().iter().map(|row| row[j]).collect() };
    let mut pairs = Vec::with_capacity(k * (k - 1) / 2);
    let mut p_values = Vec::with_capacity(pairs.capacity());
    for a in 0..k {
        let col_a = column(a);
        for b in (a + 1)..k {
            pairs.push((a, b));
            p_values.push(wilcoxon_signed_rank(&col_a, &column(b)));
        }
    }
    holm_adjust(&p_values, alpha)
        .into_iter()
        .zip(pairs)
        .map(|(d, (method_a, method_b))| PairwiseResult {
            method_a,
            method_b,
            p_raw: d.p_raw,
            holm_rank: d.holm_rank,
            holm_threshold: d.holm_threshold,
            rejected: d.rejected,
        })
        .collect()
}

/// Symmetric k x k rejection matrix from pairwise decisions.
pub fn rejection_matrix(k: usize, pairs: &[PairwiseResult]) -> Vec<Vec<bool>> {
    let mut m = vec![vec![false; k]; k];
    for p in pairs {
        m[p.method_a][p.method_b] = p.rejected;
        m[p.method_b][p.method_a] = p.rejected;
    }
    m
}

/// Knobs for [`classic_pipeline`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ClassicOptions {
    /// Run post-hoc tests only when Friedman rejects (the conventional gate).
    pub friedman_gate: bool,
    /// Rule for the diagram's non-significance bars.
    pub clique_source: CliqueSource,
}

impl Default for ClassicOptions {
    fn default() -> Self {
        ClassicOptions {
            friedman_gate: true,
            clique_source: CliqueSource::Holm,
        }
    }
}

/// Everything the standard pipeline produces.
#[derive(Debug, Clone, PartialEq)]
pub struct ClassicAnalysis {
    pub rank_matrix: RankMatrix,
    pub avg_ranks: Vec<f64>,
    pub friedman: FriedmanResult,
    /// Nemenyi CD, always present as the diagram's ruler scale.
    pub cd: f64,
    /// `None` when the Friedman gate stopped the post-hoc stage.
    pub pairwise: Option<Vec<PairwiseResult>>,
    pub cliques: CliqueSet,
}

/// Ranks, Friedman test, and (when the omnibus test rejects) pairwise
/// Wilcoxon-Holm decisions plus non-significance cliques.
pub fn classic_pipeline(
    matrix: &PerformanceMatrix,
    alpha: Alpha,
    options: ClassicOptions,
) -> Result<ClassicAnalysis> {
    let m = orient(matrix);
    let rank_matrix = RankMatrix::from_matrix(&m);
    let avg_ranks = average_ranks(&rank_matrix);
    let friedman = friedman_test(&avg_ranks, m.n_datasets(), alpha)?;
    let cd = nemenyi_cd(m.n_methods(), m.n_datasets(), alpha)?;

    let pairwise = (friedman.reject || !options.friedman_gate)
        .then(|| pairwise_wilcoxon_holm(&m, alpha));

    let cliques = match &pairwise {
        None => CliqueSet::single_clique(&avg_ranks),
        Some(pairs) => match options.clique_source {
            CliqueSource::Holm => {
                cliques_from_pairs(&rejection_matrix(m.n_methods(), pairs), &avg_ranks)
            }
            CliqueSource::CriticalDifference => cliques_from_threshold(&avg_ranks, cd),
        },
    };

    Ok(ClassicAnalysis {
        rank_matrix,
        avg_ranks,
        friedman,
        cd,
        pairwise,
        cliques,
    })
}
