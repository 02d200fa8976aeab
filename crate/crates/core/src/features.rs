//! Structural features of a square sparse matrix.

use serde::{Deserialize, Serialize};

use crate::error::Result;
use crate::matrix::CsrMatrix;

/// Feature names in the canonical column order used by datasets and models.
pub const FEATURE_NAMES: [&str; 12] = [
    "dimension",
    "nnz",
    "nnz_ratio",
    "nnz_max",
    "nnz_min",
    "nnz_avg",
    "nnz_std",
    "degree_max",
    "degree_min",
    "degree_avg",
    "bandwidth",
    "profile",
];

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FeatureVector {
    pub dimension: usize,
    pub nnz: usize,
    /// `nnz / N²`.
    pub nnz_ratio: f64,
    pub nnz_max: usize,
    pub nnz_min: usize,
    pub nnz_avg: f64,
    /// Population standard deviation of the per-row counts.
    pub nnz_std: f64,
    pub degree_max: usize,
    pub degree_min: usize,
    pub degree_avg: f64,
    pub bandwidth: usize,
    pub profile: usize,
}

impl FeatureVector {
    /// Values in [`FEATURE_NAMES`] order.
    pub fn to_array(&self) -> [f64; 12] {
        [
            self.dimension as f64,
            self.nnz as f64,
            self.nnz_ratio,
            self.nnz_max as f64,
            self.nnz_min as f64,
            self.nnz_avg,
            self.nnz_std,
            self.degree_max as f64,
            self.degree_min as f64,
            self.degree_avg,
            self.bandwidth as f64,
            self.profile as f64,
        ]
    }
}

/// Largest `|i - j|` over stored entries.
pub fn bandwidth(m: &CsrMatrix) -> Result<usize> {
    m.require_square()?;
    Ok((0..m.n_rows())
        .filter_map(|i| {
            let cols = m.row_cols(i);
            let first = cols.first()?;
            let last = cols.last()?;
            Some(i.abs_diff(*first).max(i.abs_diff(*last)))
        })
        .max()
        .unwrap_or(0))
}

/// Sum over rows of `i - min{j : (i, j) stored}`, where a row contributes
/// zero if it is empty or its leftmost entry lies right of the diagonal.
pub fn profile(m: &CsrMatrix) -> Result<usize> {
    m.require_square()?;
    Ok((0..m.n_rows())
        .map(|i| match m.row_cols(i).first() {
            Some(&j) if j <= i => i - j,
            _ => 0,
        })
        .sum())
}

pub fn extract_features(m: &CsrMatrix) -> Result<FeatureVector> {
    let graph = m.symmetrize()?;
    let n = m.n_rows();
    let nnz = m.nnz();

    let row_counts = (0..n).map(|i| m.row_cols(i).len());
    let nnz_max = row_counts.clone().max().unwrap_or(0);
    let nnz_min = row_counts.clone().min().unwrap_or(0);
    let (nnz_avg, nnz_std) = mean_and_std(row_counts);

    let degrees = (0..n).map(|v| graph.degree(v));
    let degree_max = degrees.clone().max().unwrap_or(0);
    let degree_min = degrees.clone().min().unwrap_or(0);
    let (degree_avg, _) = mean_and_std(degrees);

    let nnz_ratio = if n == 0 {
        0.0
    } else {
        nnz as f64 / (n as f64 * n as f64)
    };

    Ok(FeatureVector {
        dimension: n,
        nnz,
        nnz_ratio,
        nnz_max,
        nnz_min,
        nnz_avg,
        nnz_std,
        degree_max,
        degree_min,
        degree_avg,
        bandwidth: bandwidth(m)?,
        profile: profile(m)?,
    })
}

// Counts are integers, so the sums are exact in u128 and only the final
// divisions round.
fn mean_and_std(values: impl Iterator<Item = usize>) -> (f64, f64) {
    let (mut n, mut sum, mut sum_sq) = (0u128, 0u128, 0u128);
    for v in values {
        let v = v as u128;
        n += 1;
        sum += v;
        sum_sq += v * v;
    }
    if n == 0 {
        return (0.0, 0.0);
    }
    let mean = sum as f64 / n as f64;
    // n²·var = n·Σv² − (Σv)²
    let scaled_var = n * sum_sq - sum * sum;
    let std = (scaled_var as f64).sqrt() / n as f64;
    (mean, std)
}
