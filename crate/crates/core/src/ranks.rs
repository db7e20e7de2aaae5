//! Fractional ranking of performance rows.

use crate::matrix::PerformanceMatrix;

/// Per-dataset fractional ranks, 1 = best, k = worst.
///
/// Tied values share the mean of the rank positions they span, so every row
/// sums to k(k+1)/2.
#[derive(Debug, Clone, PartialEq)]
pub struct RankMatrix {
    ranks: Vec<Vec<f64>>,
}

impl RankMatrix {
    pub fn from_matrix(matrix: &PerformanceMatrix) -> Self {
        RankMatrix {
            ranks: matrix.values().iter().map(|row| rank_row(row)).collect(),
        }
    }

    pub fn rows(&self) -> &[Vec<f64>] {
        &self.ranks
    }

    pub fn n_datasets(&self) -> usize {
        self.ranks.len()
    }

    pub fn n_methods(&self) -> usize {
        self.ranks[0].len()
    }
}

/// Fractional ranks of one row; higher value means smaller (better) rank.
pub fn rank_row(values: &[f64]) -> Vec<f64> {
    let k = values.len();
    let mut order: Vec<usize> = (0..k).collect();
    // Descending by value; ties keep index order, which the tie-group mean
    // makes irrelevant.
    order.sort_by(|&a, &b| values[b].total_cmp(&values[a]));

    let mut ranks = vec![0.0; k];
    let mut start = 0;
    while start < k {
        let mut end = start;
        while end + 1 < k && values[order[end + 1]] == values[order[start]] {
            end += 1;
        }
        // Positions are 1-based; the group spans start+1 ..= end+1.
        let mean_rank = (start + end) as f64 / 2.0 + 1.0;
        for &idx in &order[start..=end] {
            ranks[idx] = mean_rank;
        }
        start = end + 1;
    }
    ranks
}

/// Column means of a rank matrix (the average rank R_j of each method).
pub fn average_ranks(ranks: &RankMatrix) -> Vec<f64> {
    let n = ranks.n_datasets() as f64;
    let k = ranks.n_methods();
    let mut sums = vec![0.0; k];
    for row in ranks.rows() {
        for (s, r) in sums.iter_mut().zip(row) {
            *s += r;
        }
    }
    sums.iter_mut().for_each(|s| *s /= n);
    sums
}
