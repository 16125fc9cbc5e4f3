use ndarray::{Array1, Array2, ArrayView1, ArrayView2};
use serde::{Deserialize, Serialize};

use super::standardize::{standardize_fit, StandardizationParams};
use crate::error::{Error, Result};
use crate::linalg::solve_spd;
use crate::util::to_sorted_json;

/// Relative residual accepted from the normal-equation solve.
pub const RESIDUAL_TOLERANCE: f64 = 1e-8;

/// λ used when no selection grid is requested.
pub const DEFAULT_LAMBDA: f64 = 1e-3;

/// Ridge regression fitted on standardized columns with an unpenalized
/// intercept (labels are centred before the solve).
#[derive(Clone, Debug, PartialEq)]
pub struct RidgeModel {
    pub lambda: f64,
    pub weights: Array1<f64>,
    pub intercept: f64,
    pub standardization: StandardizationParams,
    pub feature_names: Vec<String>,
    pub threshold: Option<f64>,
}

#[derive(Serialize, Deserialize)]
struct ModelFile {
    lambda: f64,
    weights: Vec<f64>,
    intercept: f64,
    means: Vec<f64>,
    scales: Vec<f64>,
    feature_names: Vec<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    threshold: Option<f64>,
}

/// Solves `(ZᵀZ + λI) b = Zᵀ(y − ȳ)` and sets `b₀ = ȳ`.
pub fn ridge_fit(z: ArrayView2<'_, f64>, y: ArrayView1<'_, f64>, lambda: f64) -> Result<RidgeModel> {
    let (n, p) = z.dim();
    if y.len() != n {
        return Err(Error::LengthMismatch { expected: n, found: y.len() });
    }
    if n == 0 {
        return Err(Error::EmptyMatrix);
    }
    if !lambda.is_finite() || lambda < 0.0 {
        return Err(Error::InvalidArgument(format!("lambda must be finite and >= 0, got {lambda}")));
    }
    if z.iter().chain(y.iter()).any(|v| !v.is_finite()) {
        return Err(Error::NonFiniteInput);
    }
    let intercept = y.sum() / n as f64;
    let yc = y.mapv(|v| v - intercept);

    let mut gram = Array2::<f64>::zeros((p, p));
    for a in 0..p {
        for b in a..p {
            let s: f64 = z.column(a).iter().zip(z.column(b)).map(|(u, v)| u * v).sum();
            gram[[a, b]] = s;
            gram[[b, a]] = s;
        }
        gram[[a, a]] += lambda;
    }
    let rhs = Array1::from_iter(z.columns().into_iter().map(|c| c.iter().zip(&yc).map(|(u, v)| u * v).sum::<f64>()));
    let weights = if p == 0 { Array1::zeros(0) } else { solve_spd(&gram, &rhs, RESIDUAL_TOLERANCE)? };

    Ok(RidgeModel {
        lambda,
        weights,
        intercept,
        standardization: StandardizationParams::identity(p),
        feature_names: (0..p).map(|j| format!("x{j}")).collect(),
        threshold: None,
    })
}

/// `ŷ = Z b + b₀`.
pub fn ridge_predict(model: &RidgeModel, z: ArrayView2<'_, f64>) -> Result<Array1<f64>> {
    model.predict(z)
}

impl RidgeModel {
    /// Standardizes raw columns `x`, fits, and records the statistics and the
    /// names of the retained columns.
    pub fn fit_standardized(x: ArrayView2<'_, f64>, y: ArrayView1<'_, f64>, lambda: f64, names: &[String]) -> Result<Self> {
        if names.len() != x.ncols() {
            return Err(Error::LengthMismatch {
                expected: x.ncols(),
                found: names.len(),
            });
        }
        let (z, params) = standardize_fit(x)?;
        let mut model = ridge_fit(z.view(), y, lambda)?;
        model.feature_names = params.retained.iter().map(|&j| names[j].clone()).collect();
        model.standardization = params;
        Ok(model)
    }

    pub fn predict(&self, z: ArrayView2<'_, f64>) -> Result<Array1<f64>> {
        if z.ncols() != self.weights.len() {
            return Err(Error::ColumnMismatch {
                expected: self.weights.len(),
                found: z.ncols(),
            });
        }
        Ok(Array1::from_iter(z.rows().into_iter().map(|row| {
            row.iter().zip(&self.weights).map(|(a, b)| a * b).sum::<f64>() + self.intercept
        })))
    }

    /// Predicts from raw (unstandardized) columns laid out as at fit time.
    pub fn predict_raw(&self, x: ArrayView2<'_, f64>) -> Result<Array1<f64>> {
        let z = self.standardization.apply(x)?;
        self.predict(z.view())
    }

    /// Physical-space coefficients `βⱼ = bⱼ/σⱼ` and intercept `β₀ = b₀ − Σ bⱼμⱼ/σⱼ`.
    pub fn destandardized(&self) -> Result<(Vec<f64>, f64)> {
        let s = &self.standardization;
        if s.scales.len() != self.weights.len() || s.means.len() != self.weights.len() {
            return Err(Error::LengthMismatch {
                expected: self.weights.len(),
                found: s.scales.len(),
            });
        }
        let mut beta = Vec::with_capacity(self.weights.len());
        let mut intercept = self.intercept;
        for (j, ((&b, &mu), &sigma)) in self.weights.iter().zip(&s.means).zip(&s.scales).enumerate() {
            if sigma.is_nan() || sigma <= 0.0 {
                return Err(Error::ZeroScale { column: j });
            }
            beta.push(b / sigma);
            intercept -= b * mu / sigma;
        }
        Ok((beta, intercept))
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(to_sorted_json(&ModelFile {
            lambda: self.lambda,
            weights: self.weights.to_vec(),
            intercept: self.intercept,
            means: self.standardization.means.clone(),
            scales: self.standardization.scales.clone(),
            feature_names: self.feature_names.clone(),
            threshold: self.threshold,
        })?)
    }

    /// Reads a model file; its standardization covers exactly `feature_names`.
    pub fn from_json(text: &str) -> Result<Self> {
        let f: ModelFile = serde_json::from_str(text)?;
        let p = f.weights.len();
        if f.means.len() != p || f.scales.len() != p || f.feature_names.len() != p {
            return Err(Error::Format("model weights, means, scales and names differ in length".into()));
        }
        Ok(RidgeModel {
            lambda: f.lambda,
            weights: Array1::from(f.weights),
            intercept: f.intercept,
            standardization: StandardizationParams {
                means: f.means,
                scales: f.scales,
                retained: (0..p).collect(),
                input_columns: p,
            },
            feature_names: f.feature_names,
            threshold: f.threshold,
        })
    }
}
