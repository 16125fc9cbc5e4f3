use ndarray::{s, ArrayView1, ArrayView2};

use super::ridge::ridge_fit;
use crate::dataset::Dataset;
use crate::error::{Error, Result};
use crate::metrics::mse;

/// Ten log-spaced values from 1e-6 to 1e2.
pub fn default_lambda_grid() -> Vec<f64> {
    (0..10).map(|i| 10f64.powf(-6.0 + 8.0 * i as f64 / 9.0)).collect()
}

/// Picks the λ with the lowest validation MSE, validating on the last
/// `val_fraction` of the rows (chronological tail). Ties go to the larger λ.
/// A λ whose fit fails (e.g. λ = 0 on a singular design) is skipped.
pub fn select_lambda(z: ArrayView2<'_, f64>, y: ArrayView1<'_, f64>, grid: &[f64], val_fraction: f64) -> Result<f64> {
    if grid.is_empty() {
        return Err(Error::InsufficientData("empty lambda grid".into()));
    }
    if !(val_fraction > 0.0 && val_fraction < 1.0) {
        return Err(Error::InvalidArgument(format!("validation fraction must be in (0, 1), got {val_fraction}")));
    }
    if y.len() != z.nrows() {
        return Err(Error::LengthMismatch {
            expected: z.nrows(),
            found: y.len(),
        });
    }
    let cut = Dataset::split_point(z.nrows(), 1.0 - val_fraction)
        .map_err(|_| Error::InsufficientData(format!("{} rows cannot be split for validation", z.nrows())))?;
    let (zt, zv) = (z.slice(s![..cut, ..]), z.slice(s![cut.., ..]));
    let (yt, yv) = (y.slice(s![..cut]), y.slice(s![cut..]));

    let mut best: Option<(f64, f64)> = None;
    let mut last_err = None;
    for &lambda in grid {
        let score = match ridge_fit(zt, yt, lambda).and_then(|m| m.predict(zv)).and_then(|p| mse(yv, p.view())) {
            Ok(v) => v,
            Err(e) => {
                log::debug!("lambda {lambda} skipped: {e}");
                last_err = Some(e);
                continue;
            }
        };
        best = match best {
            Some((bl, bs)) if bs < score || (bs == score && bl >= lambda) => Some((bl, bs)),
            _ => Some((lambda, score)),
        };
    }
    match (best, last_err) {
        (Some((lambda, _)), _) => Ok(lambda),
        (None, Some(e)) => Err(e),
        (None, None) => unreachable!("grid is nonempty"),
    }
}
