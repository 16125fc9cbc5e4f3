//! Greedy coefficient-ordered forward selection with MAE/MSE saturation.

use ndarray::{s, ArrayView1, ArrayView2, Axis};
use serde::{Deserialize, Serialize};

use crate::dataset::Dataset;
use crate::error::{Error, Result};
use crate::metrics::{mae, mse};
use crate::par::Execution;
use crate::regression::{ridge_fit, RidgeModel};
use crate::util::to_sorted_json;

pub const DEFAULT_EPSILON: f64 = 0.01;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct CurvePoint {
    pub k: usize,
    pub mae: f64,
    pub mse: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RankingResult {
    pub order: Vec<usize>,
    pub selected_count: usize,
    pub curve: Vec<CurvePoint>,
    pub epsilon: f64,
}

impl RankingResult {
    /// Column indices of the selected prefix of `order`.
    pub fn selected(&self) -> &[usize] {
        &self.order[..self.selected_count]
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(to_sorted_json(self)?)
    }

    /// `k,mae,mse` rows for plotting.
    pub fn curve_csv(&self) -> String {
        let mut out = String::from("k,mae,mse\n");
        for p in &self.curve {
            out.push_str(&format!("{},{:?},{:?}\n", p.k, p.mae, p.mse));
        }
        out
    }
}

/// Column indices by decreasing `|bⱼ|`; equal magnitudes keep index order.
pub fn rank_by_coefficient(model: &RidgeModel) -> Vec<usize> {
    let mut order: Vec<usize> = (0..model.weights.len()).collect();
    order.sort_by(|&a, &b| model.weights[b].abs().total_cmp(&model.weights[a].abs()));
    order
}

fn relative_improvement(prev: f64, cur: f64) -> f64 {
    if prev > 0.0 {
        (prev - cur) / prev
    } else {
        0.0
    }
}

/// Index of the saturation point: the first `k ≥ 2` at which both MAE and
/// MSE improve by less than `epsilon` relative to `k − 1` gives `k − 1`;
/// without such a `k`, every column is selected.
pub fn saturation_count(curve: &[CurvePoint], epsilon: f64) -> usize {
    curve
        .windows(2)
        .find(|w| {
            relative_improvement(w[0].mae, w[1].mae) < epsilon && relative_improvement(w[0].mse, w[1].mse) < epsilon
        })
        .map_or(curve.len(), |w| w[0].k)
}

pub fn greedy_select(
    z_train: ArrayView2<'_, f64>,
    y_train: ArrayView1<'_, f64>,
    z_test: ArrayView2<'_, f64>,
    y_test: ArrayView1<'_, f64>,
    lambda: f64,
    order: &[usize],
    epsilon: f64,
) -> Result<RankingResult> {
    greedy_select_with(z_train, y_train, z_test, y_test, lambda, order, epsilon, Execution::default())
}

/// Refits ridge on the top-`k` ranked columns for every `k = 1..p` and
/// records held-out MAE/MSE. The whole curve is evaluated so the plateau past
/// the stopping point is visible; the per-`k` fits are independent and run in
/// parallel when requested.
#[allow(clippy::too_many_arguments)]
pub fn greedy_select_with(
    z_train: ArrayView2<'_, f64>,
    y_train: ArrayView1<'_, f64>,
    z_test: ArrayView2<'_, f64>,
    y_test: ArrayView1<'_, f64>,
    lambda: f64,
    order: &[usize],
    epsilon: f64,
    exec: Execution,
) -> Result<RankingResult> {
    let p = z_train.ncols();
    if z_test.ncols() != p {
        return Err(Error::ColumnMismatch {
            expected: p,
            found: z_test.ncols(),
        });
    }
    if p == 0 {
        return Err(Error::EmptyMatrix);
    }
    let mut seen = vec![false; p];
    if order.len() != p || !order.iter().all(|&j| j < p && !std::mem::replace(&mut seen[j], true)) {
        return Err(Error::InvalidArgument(format!("order must be a permutation of 0..{p}")));
    }
    if epsilon.is_nan() || epsilon <= 0.0 {
        return Err(Error::InvalidArgument(format!("epsilon must be positive, got {epsilon}")));
    }
    let curve = exec
        .map_range(p, |i| {
            let cols = &order[..=i];
            let model = ridge_fit(z_train.select(Axis(1), cols).view(), y_train, lambda)?;
            let pred = model.predict(z_test.select(Axis(1), cols).view())?;
            Ok(CurvePoint {
                k: i + 1,
                mae: mae(y_test, pred.view())?,
                mse: mse(y_test, pred.view())?,
            })
        })
        .into_iter()
        .collect::<Result<Vec<_>>>()?;
    Ok(RankingResult {
        order: order.to_vec(),
        selected_count: saturation_count(&curve, epsilon),
        curve,
        epsilon,
    })
}

/// Leakage-free variant: the curve is measured on the chronological tail
/// (`val_fraction`) of the training rows instead of a test set.
pub fn greedy_select_validation(
    z_train: ArrayView2<'_, f64>,
    y_train: ArrayView1<'_, f64>,
    lambda: f64,
    order: &[usize],
    epsilon: f64,
    val_fraction: f64,
) -> Result<RankingResult> {
    if !(val_fraction > 0.0 && val_fraction < 1.0) {
        return Err(Error::InvalidArgument(format!("validation fraction must be in (0, 1), got {val_fraction}")));
    }
    let cut = Dataset::split_point(z_train.nrows(), 1.0 - val_fraction)
        .map_err(|_| Error::InsufficientData(format!("{} rows cannot be split for validation", z_train.nrows())))?;
    greedy_select(
        z_train.slice(s![..cut, ..]),
        y_train.slice(s![..cut]),
        z_train.slice(s![cut.., ..]),
        y_train.slice(s![cut..]),
        lambda,
        order,
        epsilon,
    )
}
