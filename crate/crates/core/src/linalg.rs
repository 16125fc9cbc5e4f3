//! Small dense symmetric positive-definite solves.

use ndarray::{Array1, Array2};

use crate::error::{Error, Result};

/// Lower Cholesky factor of `a`, or `None` when a pivot is not safely positive.
pub(crate) fn cholesky(a: &Array2<f64>) -> Option<Array2<f64>> {
    let p = a.nrows();
    let scale = (0..p).map(|i| a[[i, i]].abs()).fold(0.0, f64::max);
    let tiny = scale * 1e-12;
    let mut l = Array2::<f64>::zeros((p, p));
    for j in 0..p {
        let mut d = a[[j, j]];
        for k in 0..j {
            d -= l[[j, k]] * l[[j, k]];
        }
        if d.is_nan() || d <= tiny {
            return None;
        }
        let djj = d.sqrt();
        l[[j, j]] = djj;
        for i in j + 1..p {
            let mut s = a[[i, j]];
            for k in 0..j {
                s -= l[[i, k]] * l[[j, k]];
            }
            l[[i, j]] = s / djj;
        }
    }
    Some(l)
}

fn cholesky_solve(l: &Array2<f64>, b: &Array1<f64>) -> Array1<f64> {
    let p = l.nrows();
    let mut y = b.clone();
    for i in 0..p {
        let mut s = y[i];
        for k in 0..i {
            s -= l[[i, k]] * y[k];
        }
        y[i] = s / l[[i, i]];
    }
    for i in (0..p).rev() {
        let mut s = y[i];
        for k in i + 1..p {
            s -= l[[k, i]] * y[k];
        }
        y[i] = s / l[[i, i]];
    }
    y
}

pub(crate) fn mat_vec(a: &Array2<f64>, x: &Array1<f64>) -> Array1<f64> {
    Array1::from_iter(a.rows().into_iter().map(|row| row.iter().zip(x).map(|(a, b)| a * b).sum::<f64>()))
}

pub(crate) fn norm(x: &Array1<f64>) -> f64 {
    x.iter().map(|v| v * v).sum::<f64>().sqrt()
}

/// Solves the SPD system `a x = b` by Cholesky with one step of iterative
/// refinement, then checks `‖a x − b‖ ≤ tol·‖b‖`.
pub(crate) fn solve_spd(a: &Array2<f64>, b: &Array1<f64>, tol: f64) -> Result<Array1<f64>> {
    let l = cholesky(a).ok_or(Error::SingularSystem)?;
    let mut x = cholesky_solve(&l, b);
    let r = b - &mat_vec(a, &x);
    x += &cholesky_solve(&l, &r);
    let residual = norm(&(&mat_vec(a, &x) - b));
    if !residual.is_finite() || residual > tol * norm(b) {
        return Err(Error::SingularSystem);
    }
    Ok(x)
}
