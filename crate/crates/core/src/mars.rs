//! Magnitude-aware rank statistics: margin weights with a dynamic
//! worst-performer penalty, weighted rank scores, the rescaled critical
//! difference, and the global permutation test.
//!
//! Weights price each method by how close it sits to the worst performer on
//! a dataset: the row maximum gets weight 1, a method just above the minimum
//! gets a large weight, and the minimum itself is charged the largest
//! above-minimum weight plus the biggest consecutive gap observed among the
//! others. Scores are the per-method means of rank x weight, so they live in
//! [1, inf) and smaller is better.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::classic::{pairwise_wilcoxon_holm, rejection_matrix, PairwiseResult};
use crate::diagram::{cliques_from_pairs, cliques_from_threshold, CliqueSet, CliqueSource};
use crate::dist::Alpha;
use crate::error::Result;
use crate::matrix::{orient, PerformanceMatrix};
use crate::ranks::rank_row;
use crate::rng::SplitMix64;

/// Which population the empirical sigma of the weighted ranks is taken over.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum SigmaMode {
    /// All N x k weighted-rank entries (default).
    #[serde(rename = "pooled")]
    Pooled,
    /// The k per-method mean scores.
    #[serde(rename = "scores")]
    MethodScores,
}

/// Per-dataset weights and weighted ranks.
#[derive(Debug, Clone, PartialEq)]
pub struct WeightedRankMatrix {
    pub weights: Vec<Vec<f64>>,
    pub weighted_ranks: Vec<Vec<f64>>,
}

impl WeightedRankMatrix {
    pub fn n_datasets(&self) -> usize {
        self.weighted_ranks.len()
    }

    pub fn n_methods(&self) -> usize {
        self.weighted_ranks[0].len()
    }
}

/// Mean weighted ranks with the sigma and critical difference that go with
/// them.
#[derive(Debug, Clone, PartialEq)]
pub struct MarsScores {
    pub scores: Vec<f64>,
    pub sigma: f64,
    pub cd: f64,
}

/// Outcome of the global permutation test.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PermutationResult {
    /// Population variance of the observed scores.
    pub observed_statistic: f64,
    /// Fraction of permutations whose null statistic reached the observed one.
    pub p_value: f64,
    pub rho: u32,
    pub seed: u64,
}

/// Margin weights for one row of metric values (higher is better).
///
/// For values strictly above the row minimum, w = (max - min) / (v - min).
/// The m methods tied at the minimum all receive the largest above-minimum
/// weight plus the largest consecutive gap among the sorted above-minimum
/// weights; that gap defaults to the smallest above-minimum weight when only
/// one distinct level sits above the minimum. An all-equal row carries no
/// magnitude information and gets weight 1 everywhere.
pub fn weight_row(values: &[f64]) -> Vec<f64> {
    let k = values.len();
    let y_max = values.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let y_min = values.iter().copied().fold(f64::INFINITY, f64::min);
    if y_max == y_min {
        return vec![1.0; k];
    }

    let range = y_max - y_min;
    let mut weights = vec![0.0; k];
    let mut above: Vec<f64> = Vec::with_capacity(k);
    for (w, &v) in weights.iter_mut().zip(values) {
        if v > y_min {
            *w = range / (v - y_min);
            above.push(*w);
        }
    }
    above.sort_by(f64::total_cmp);

    // Exact equality is intended here: equal inputs produce identical
    // weight computations.
    let all_equal = above[0] == above[above.len() - 1];
    let delta_max = if above.len() == 1 || all_equal {
        above[0]
    } else {
        above
            .windows(2)
            .map(|w| w[1] - w[0])
            .fold(f64::NEG_INFINITY, f64::max)
    };
    let w_min = above[above.len() - 1] + delta_max;

    for (w, &v) in weights.iter_mut().zip(values) {
        if v == y_min {
            *w = w_min;
        }
    }
    weights
}

/// Weighted ranks of a raw value matrix and their column means.
fn column_scores(rows: &[Vec<f64>]) -> (Vec<Vec<f64>>, Vec<Vec<f64>>, Vec<f64>) {
    let n = rows.len();
    let k = rows[0].len();
    let mut weights = Vec::with_capacity(n);
    let mut weighted = Vec::with_capacity(n);
    let mut sums = vec![0.0; k];
    for row in rows {
        let r = rank_row(row);
        let w = weight_row(row);
        let wr: Vec<f64> = r.iter().zip(&w).map(|(r, w)| r * w).collect();
        for (s, v) in sums.iter_mut().zip(&wr) {
            *s += v;
        }
        weights.push(w);
        weighted.push(wr);
    }
    sums.iter_mut().for_each(|s| *s /= n as f64);
    (weights, weighted, sums)
}

/// Weighted rank matrix and mean weighted rank per method.
pub fn mars_scores(matrix: &PerformanceMatrix) -> (WeightedRankMatrix, Vec<f64>) {
    let m = orient(matrix);
    let (weights, weighted_ranks, scores) = column_scores(m.values());
    (
        WeightedRankMatrix {
            weights,
            weighted_ranks,
        },
        scores,
    )
}

fn population_variance(values: &[f64]) -> f64 {
    let n = values.len() as f64;
    let mean = values.iter().sum::<f64>() / n;
    values.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / n
}

/// Population standard deviation of the weighted ranks under the given mode.
pub fn weighted_rank_sigma(weighted: &WeightedRankMatrix, mode: SigmaMode) -> f64 {
    match mode {
        SigmaMode::Pooled => {
            let all: Vec<f64> = weighted
                .weighted_ranks
                .iter()
                .flat_map(|row| row.iter().copied())
                .collect();
            population_variance(&all).sqrt()
        }
        SigmaMode::MethodScores => {
            let n = weighted.n_datasets() as f64;
            let k = weighted.n_methods();
            let means: Vec<f64> = (0..k)
                .map(|j| weighted.weighted_ranks.iter().map(|r| r[j]).sum::<f64>() / n)
                .collect();
            population_variance(&means).sqrt()
        }
    }
}

/// Critical difference rescaled for the weighted rank space:
/// CD = q_{alpha,k} * sqrt(k(k+1)/(6N)) * sigma / sqrt((k^2 - 1)/12),
/// where the denominator is the population standard deviation of plain
/// integer ranks 1..k.
pub fn mars_cd(weighted: &WeightedRankMatrix, alpha: Alpha, mode: SigmaMode) -> Result<f64> {
    let k = weighted.n_methods();
    let n = weighted.n_datasets();
    let sigma = weighted_rank_sigma(weighted, mode);
    let kf = k as f64;
    let base = crate::classic::nemenyi_cd(k, n, alpha)?;
    Ok(base * (sigma / ((kf * kf - 1.0) / 12.0).sqrt()))
}

/// Global permutation test on the variance of the mean weighted ranks.
///
/// Each of the `rho` permutations shuffles every dataset row independently
/// and recomputes the full rank/weight pipeline. Stream seeds are derived
/// up front, one per permutation index, so the result depends only on
/// (matrix, rho, seed) and never on scheduling or thread count.
pub fn permutation_test(matrix: &PerformanceMatrix, rho: u32, seed: u64) -> PermutationResult {
    assert!(rho >= 1, "need at least one permutation");
    let m = orient(matrix);
    let (_, _, scores) = column_scores(m.values());
    let observed = population_variance(&scores);

    let mut root = SplitMix64::new(seed);
    let stream_seeds: Vec<u64> = (0..rho).map(|_| root.next_u64()).collect();

    let exceed: u64 = stream_seeds
        .par_iter()
        .map(|&stream_seed| {
            let mut rng = SplitMix64::new(stream_seed);
            let mut rows = m.values().to_vec();
            for row in &mut rows {
                rng.shuffle(row);
            }
            let (_, _, null_scores) = column_scores(&rows);
            u64::from(population_variance(&null_scores) >= observed)
        })
        .sum();

    PermutationResult {
        observed_statistic: observed,
        p_value: exceed as f64 / rho as f64,
        rho,
        seed,
    }
}

/// Knobs for [`mars_pipeline`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MarsOptions {
    pub rho: u32,
    pub seed: u64,
    pub sigma_mode: SigmaMode,
    pub clique_source: CliqueSource,
}

impl Default for MarsOptions {
    fn default() -> Self {
        MarsOptions {
            rho: 10_000,
            seed: 42,
            sigma_mode: SigmaMode::Pooled,
            clique_source: CliqueSource::CriticalDifference,
        }
    }
}

/// Everything the MARS pipeline produces.
#[derive(Debug, Clone, PartialEq)]
pub struct MarsAnalysis {
    pub weighted: WeightedRankMatrix,
    pub scores: MarsScores,
    /// Complementary global significance; pairwise decisions stay with
    /// Wilcoxon-Holm.
    pub permutation: PermutationResult,
    pub pairwise: Vec<PairwiseResult>,
    pub cliques: CliqueSet,
}

/// Scores, rescaled critical difference, permutation test, and pairwise
/// Wilcoxon-Holm decisions (the same tests the standard pipeline runs).
pub fn mars_pipeline(
    matrix: &PerformanceMatrix,
    alpha: Alpha,
    options: MarsOptions,
) -> Result<MarsAnalysis> {
    let m = orient(matrix);
    let (weighted, scores) = mars_scores(&m);
    let sigma = weighted_rank_sigma(&weighted, options.sigma_mode);
    let cd = mars_cd(&weighted, alpha, options.sigma_mode)?;
    let permutation = permutation_test(&m, options.rho, options.seed);
    let pairwise = pairwise_wilcoxon_holm(&m, alpha);

    let cliques = match options.clique_source {
        CliqueSource::CriticalDifference => cliques_from_threshold(&scores, cd),
        CliqueSource::Holm => {
            cliques_from_pairs(&rejection_matrix(m.n_methods(), &pairwise), &scores)
        }
    };

    Ok(MarsAnalysis {
        weighted,
        scores: MarsScores { scores, sigma, cd },
        permutation,
        pairwise,
        cliques,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::matrix::Direction;
    use approx::assert_abs_diff_eq;
    use proptest::prelude::*;

    fn alpha05() -> Alpha {
        Alpha::new(0.05).unwrap()
    }

    fn matrix(blocks: &[(&[f64], usize)]) -> PerformanceMatrix {
        let mut values = Vec::new();
        for (row, count) in blocks {
            values.extend(std::iter::repeat_n(row.to_vec(), *count));
        }
        let k = values[0].len();
        PerformanceMatrix::new(
            (0..k).map(|j| format!("{}", (b'A' + j as u8) as char)).collect(),
            (0..values.len()).map(|i| format!("D{i}")).collect(),
            values,
            Direction::HigherBetter,
        )
        .unwrap()
    }

    #[test]
    fn weights_major_win_row() {
        // Range 0.65: w_B = 0.65/0.20 = 3.25, gap 2.25, w_C = 5.5.
        let w = weight_row(&[0.95, 0.50, 0.30]);
        assert_abs_diff_eq!(w[0], 1.0, epsilon = 1e-12);
        assert_abs_diff_eq!(w[1], 3.25, epsilon = 1e-12);
        assert_abs_diff_eq!(w[2], 5.5, epsilon = 1e-12);
    }

    #[test]
    fn weights_minor_loss_row() {
        // w_A = 0.65/0.64 = 1.015625, gap 0.015625, w_C = 1.03125.
        let w = weight_row(&[0.94, 0.95, 0.30]);
        assert_abs_diff_eq!(w[0], 1.015625, epsilon = 1e-12);
        assert_abs_diff_eq!(w[1], 1.0, epsilon = 1e-12);
        assert_abs_diff_eq!(w[2], 1.03125, epsilon = 1e-12);
    }

    #[test]
    fn weights_two_methods_default_gap() {
        // k - m = 1, so the gap defaults to w_(1) = 1 and w_min = 2.
        assert_eq!(weight_row(&[0.9, 0.4]), vec![1.0, 2.0]);
    }

    #[test]
    fn weights_all_equal_row() {
        assert_eq!(weight_row(&[0.7, 0.7, 0.7]), vec![1.0, 1.0, 1.0]);
    }

    #[test]
    fn weights_above_minimum_all_equal() {
        // Two methods tied at the top: both weight 1; gap defaults to 1.
        assert_eq!(weight_row(&[0.5, 0.5, 0.3]), vec![1.0, 1.0, 2.0]);
    }

    #[test]
    fn scores_scenario1() {
        let (_, scores) = mars_scores(&matrix(&[
            (&[0.95, 0.50, 0.30], 20),
            (&[0.94, 0.95, 0.30], 20),
        ]));
        assert_abs_diff_eq!(scores[0], 1.515625, epsilon = 1e-12);
        assert_abs_diff_eq!(scores[1], 3.75, epsilon = 1e-12);
        assert_abs_diff_eq!(scores[2], 9.796875, epsilon = 1e-12);
    }

    #[test]
    fn scores_scenario4_reverses_leader() {
        let (_, scores) = mars_scores(&matrix(&[
            (&[0.8499, 0.8500, 0.7500], 30),
            (&[0.90, 0.15, 0.75], 10),
        ]));
        assert_abs_diff_eq!(scores[0], 1.7515015015015015, epsilon = 1e-9);
        assert_abs_diff_eq!(scores[1], 1.875, epsilon = 1e-12);
        assert_abs_diff_eq!(scores[2], 2.8795045045045045, epsilon = 1e-9);
        // A beats B here even though B has the better average rank.
        assert!(scores[0] < scores[1]);
    }

    #[test]
    fn scores_scenario5_isolates_the_survivor() {
        let (_, scores) = mars_scores(&matrix(&[
            (&[0.950, 0.951, 0.952], 30),
            (&[0.940, 0.400, 0.350], 10),
        ]));
        assert_abs_diff_eq!(scores[0], 7.0, epsilon = 1e-9);
        assert_abs_diff_eq!(scores[1], 8.9, epsilon = 1e-9);
        assert_abs_diff_eq!(scores[2], 17.7, epsilon = 1e-9);
    }

    #[test]
    fn scores_constant_matrix() {
        let (_, scores) = mars_scores(&matrix(&[(&[0.4, 0.4, 0.4], 5)]));
        assert_eq!(scores, vec![2.0, 2.0, 2.0]);
    }

    #[test]
    fn cd_scenario1_both_modes() {
        let (weighted, _) = mars_scores(&matrix(&[
            (&[0.95, 0.50, 0.30], 20),
            (&[0.94, 0.95, 0.30], 20),
        ]));
        let pooled_sigma = weighted_rank_sigma(&weighted, SigmaMode::Pooled);
        assert_abs_diff_eq!(pooled_sigma, 5.46115, epsilon = 1e-5);
        let cd_pooled = mars_cd(&weighted, alpha05(), SigmaMode::Pooled).unwrap();
        assert_abs_diff_eq!(cd_pooled, 3.5042, epsilon = 1e-3);
        let scores_sigma = weighted_rank_sigma(&weighted, SigmaMode::MethodScores);
        assert_abs_diff_eq!(scores_sigma, 3.4982, epsilon = 1e-4);
        let cd_scores = mars_cd(&weighted, alpha05(), SigmaMode::MethodScores).unwrap();
        assert_abs_diff_eq!(cd_scores, 2.2448, epsilon = 1e-3);
    }

    #[test]
    fn cd_is_zero_iff_sigma_is_zero() {
        let (weighted, _) = mars_scores(&matrix(&[(&[0.4, 0.4, 0.4], 5)]));
        assert_eq!(weighted_rank_sigma(&weighted, SigmaMode::Pooled), 0.0);
        assert_eq!(mars_cd(&weighted, alpha05(), SigmaMode::Pooled).unwrap(), 0.0);
    }

    #[test]
    fn cd_ratio_identity() {
        // CD_MARS / nemenyi_cd == sigma / sqrt((k^2-1)/12) in both modes.
        let (weighted, _) = mars_scores(&matrix(&[
            (&[0.81, 0.80, 0.20], 30),
            (&[0.10, 0.95, 0.08], 10),
        ]));
        let base = crate::classic::nemenyi_cd(3, 40, alpha05()).unwrap();
        for mode in [SigmaMode::Pooled, SigmaMode::MethodScores] {
            let cd = mars_cd(&weighted, alpha05(), mode).unwrap();
            let sigma = weighted_rank_sigma(&weighted, mode);
            let expected = sigma / ((9.0f64 - 1.0) / 12.0).sqrt();
            assert_abs_diff_eq!(cd / base, expected, epsilon = 1e-13);
        }
    }

    #[test]
    fn permutation_constant_matrix_p_is_one() {
        let m = matrix(&[(&[0.5, 0.5, 0.5], 4)]);
        let r = permutation_test(&m, 500, 7);
        assert_eq!(r.observed_statistic, 0.0);
        assert_eq!(r.p_value, 1.0);
    }

    #[test]
    fn permutation_scenario1_is_significant() {
        let m = matrix(&[(&[0.95, 0.50, 0.30], 20), (&[0.94, 0.95, 0.30], 20)]);
        let r = permutation_test(&m, 1000, 3);
        assert!(r.p_value <= 0.001, "p = {}", r.p_value);
    }

    #[test]
    fn permutation_is_bit_deterministic() {
        let m = matrix(&[(&[0.6, 0.5, 0.4], 6), (&[0.4, 0.6, 0.5], 6)]);
        let a = permutation_test(&m, 400, 99);
        let b = permutation_test(&m, 400, 99);
        assert_eq!(a.p_value.to_bits(), b.p_value.to_bits());
        // p-values are exact multiples of 1/rho.
        let scaled = a.p_value * 400.0;
        assert_eq!(scaled, scaled.round());
    }

    #[test]
    fn pipeline_scenario2_favors_robustness() {
        let m = matrix(&[(&[0.81, 0.80, 0.20], 30), (&[0.10, 0.95, 0.08], 10)]);
        let analysis = mars_pipeline(&m, alpha05(), MarsOptions { rho: 200, ..Default::default() }).unwrap();
        let s = &analysis.scores.scores;
        assert_abs_diff_eq!(s[0], 22.5, epsilon = 1e-9);
        assert_abs_diff_eq!(s[1], 1.775, epsilon = 1e-9);
        assert_abs_diff_eq!(s[2], 66.825, epsilon = 1e-9);
        // B < A < C in score while average ranks order A < B < C.
        assert!(s[1] < s[0] && s[0] < s[2]);
    }

    #[test]
    fn pipeline_scenario3_separates_b_and_c() {
        let m = matrix(&[(&[0.70, 0.90, 0.50], 20), (&[0.70, 0.10, 0.50], 20)]);
        let analysis = mars_pipeline(&m, alpha05(), MarsOptions { rho: 200, ..Default::default() }).unwrap();
        let s = &analysis.scores.scores;
        assert_abs_diff_eq!(s[0], 2.5, epsilon = 1e-12);
        assert_abs_diff_eq!(s[1], 3.5, epsilon = 1e-12);
        assert_abs_diff_eq!(s[2], 6.0, epsilon = 1e-12);
        assert_abs_diff_eq!(analysis.scores.cd, 1.8154, epsilon = 1e-3);
        // B and C never share a clique.
        for clique in &analysis.cliques.cliques {
            assert!(!(clique.contains(&1) && clique.contains(&2)));
        }
    }

    #[test]
    fn score_floor_for_a_method_best_everywhere() {
        let m = matrix(&[(&[0.9, 0.5, 0.2], 7), (&[0.8, 0.1, 0.7], 7)]);
        let (_, scores) = mars_scores(&m);
        assert_eq!(scores[0], 1.0);
    }

    proptest! {
        #[test]
        fn monotone_penalty_when_sliding_toward_the_minimum(
            grid in proptest::collection::vec(1u16..200, 4),
            steps in 1u16..100,
        ) {
            // Decrease one above-minimum value toward the minimum, order
            // preserved: its weight must not decrease.
            let mut row: Vec<f64> = grid.iter().map(|&v| v as f64 / 4.0).collect();
            row.sort_by(f64::total_cmp);
            row.dedup();
            prop_assume!(row.len() >= 3);
            let target = 1; // second smallest, stays above the minimum
            let w_before = weight_row(&row)[target];
            let mut moved = row.clone();
            let lo = moved[0];
            moved[target] = lo + (moved[target] - lo) * (steps as f64 / 100.0);
            prop_assume!(moved[target] > lo && moved[target] < row[2]);
            let w_after = weight_row(&moved)[target];
            prop_assert!(w_after >= w_before - 1e-12);
        }

        #[test]
        fn column_and_row_equivariance_of_scores(
            cells in proptest::collection::vec(0u16..64, 12),
        ) {
            let rows: Vec<Vec<f64>> = cells.chunks(3).map(|c| c.iter().map(|&v| v as f64 / 8.0).collect()).collect();
            let datasets: Vec<String> = (0..4).map(|i| format!("d{i}")).collect();
            let m = PerformanceMatrix::new(
                vec!["A".into(), "B".into(), "C".into()],
                datasets.clone(),
                rows.clone(),
                Direction::HigherBetter,
            ).unwrap();
            let (_, base) = mars_scores(&m);

            // Permute columns (C, A, B): scores permute identically.
            let col_perm: Vec<Vec<f64>> = rows.iter().map(|r| vec![r[2], r[0], r[1]]).collect();
            let mc = PerformanceMatrix::new(
                vec!["C".into(), "A".into(), "B".into()],
                datasets.clone(),
                col_perm,
                Direction::HigherBetter,
            ).unwrap();
            let (_, permuted) = mars_scores(&mc);
            prop_assert_eq!(permuted, vec![base[2], base[0], base[1]]);

            // Reverse rows: scores unchanged.
            let mr = PerformanceMatrix::new(
                vec!["A".into(), "B".into(), "C".into()],
                datasets,
                rows.iter().rev().cloned().collect(),
                Direction::HigherBetter,
            ).unwrap();
            let (_, reversed) = mars_scores(&mr);
            for (x, y) in base.iter().zip(&reversed) {
                prop_assert!((x - y).abs() < 1e-12);
            }
        }
    }
}
