use ndarray::{Array2, ArrayView2, Axis};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Column means and population standard deviations from a training matrix.
///
/// Columns with (relatively) zero spread are dropped; `retained` lists the
/// input columns that survive, in order, and `means`/`scales` align with it.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct StandardizationParams {
    pub means: Vec<f64>,
    pub scales: Vec<f64>,
    pub retained: Vec<usize>,
    pub input_columns: usize,
}

impl StandardizationParams {
    /// Means 0 and scales 1 over `p` columns.
    pub fn identity(p: usize) -> Self {
        StandardizationParams {
            means: vec![0.0; p],
            scales: vec![1.0; p],
            retained: (0..p).collect(),
            input_columns: p,
        }
    }

    pub fn dropped(&self) -> Vec<usize> {
        (0..self.input_columns).filter(|j| !self.retained.contains(j)).collect()
    }

    /// Standardizes `x` with the stored statistics (never recomputed).
    pub fn apply(&self, x: ArrayView2<'_, f64>) -> Result<Array2<f64>> {
        if x.ncols() != self.input_columns {
            return Err(Error::ColumnMismatch {
                expected: self.input_columns,
                found: x.ncols(),
            });
        }
        let mut z = x.select(Axis(1), &self.retained);
        for (mut col, (&mu, &sigma)) in z.columns_mut().into_iter().zip(self.means.iter().zip(&self.scales)) {
            col.mapv_inplace(|v| (v - mu) / sigma);
        }
        Ok(z)
    }
}

/// Fits per-column statistics on `x` and returns the standardized matrix.
pub fn standardize_fit(x: ArrayView2<'_, f64>) -> Result<(Array2<f64>, StandardizationParams)> {
    let (n, p) = x.dim();
    if n < 2 {
        return Err(Error::EmptyMatrix);
    }
    let mut params = StandardizationParams {
        means: Vec::new(),
        scales: Vec::new(),
        retained: Vec::new(),
        input_columns: p,
    };
    for (j, col) in x.columns().into_iter().enumerate() {
        if col.iter().any(|v| !v.is_finite()) {
            return Err(Error::NonFiniteInput);
        }
        let mean = col.iter().sum::<f64>() / n as f64;
        let var = col.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / n as f64;
        let sigma = var.sqrt();
        if sigma.is_nan() || sigma <= 1e-12 * mean.abs() {
            log::warn!("dropping column {j}: zero variance (mean {mean})");
            continue;
        }
        params.means.push(mean);
        params.scales.push(sigma);
        params.retained.push(j);
    }
    let z = params.apply(x)?;
    Ok((z, params))
}
