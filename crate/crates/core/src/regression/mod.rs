//! Standardization, closed-form ridge regression, λ selection, the kernel
//! Gram matrix and threshold classification.

mod ridge;
mod select;
mod standardize;

use ndarray::{Array2, ArrayView2};

pub use ridge::{ridge_fit, ridge_predict, RidgeModel, DEFAULT_LAMBDA, RESIDUAL_TOLERANCE};
pub use select::{default_lambda_grid, select_lambda};
pub use standardize::{standardize_fit, StandardizationParams};

use crate::par::Execution;

/// Default decision threshold for {0, 1} targets.
pub const DEFAULT_THRESHOLD: f64 = 0.5;

/// `K = ΦΦᵀ`, the Gram matrix of the linear kernel induced by the feature map.
pub fn gram_matrix(phi: ArrayView2<'_, f64>) -> Array2<f64> {
    gram_matrix_with(phi, Execution::default())
}

/// Rows of the upper triangle are computed independently (in parallel when
/// requested) with a fixed summation order, then mirrored, so `K` is exactly
/// symmetric and identical in both modes.
pub fn gram_matrix_with(phi: ArrayView2<'_, f64>, exec: Execution) -> Array2<f64> {
    let n = phi.nrows();
    let rows: Vec<Vec<f64>> = exec.map_range(n, |i| {
        let a = phi.row(i);
        (i..n)
            .map(|j| a.iter().zip(phi.row(j)).map(|(u, v)| u * v).sum())
            .collect()
    });
    let mut k = Array2::zeros((n, n));
    for (i, row) in rows.into_iter().enumerate() {
        for (off, v) in row.into_iter().enumerate() {
            k[[i, i + off]] = v;
            k[[i + off, i]] = v;
        }
    }
    k
}

/// Label 1 iff `score >= threshold`.
pub fn classify(scores: &[f64], threshold: f64) -> Vec<u8> {
    scores.iter().map(|&s| u8::from(s >= threshold)).collect()
}
