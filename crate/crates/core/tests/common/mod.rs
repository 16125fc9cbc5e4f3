//! Independent oracles shared by the integration and acceptance tests.
#![allow(dead_code)]

use ndarray::{Array1, Array2};
use pifml::featuremap::{EnumerationBounds, Monomial, PhysicalConstant};
use pifml::Dimension;
use rand_chacha::rand_core::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub struct Rng(ChaCha8Rng);

impl Rng {
    pub fn new(seed: u64) -> Self {
        Rng(ChaCha8Rng::seed_from_u64(seed))
    }

    pub fn unit(&mut self) -> f64 {
        (self.0.next_u64() >> 11) as f64 / (1u64 << 53) as f64
    }

    pub fn range(&mut self, lo: f64, hi: f64) -> f64 {
        lo + (hi - lo) * self.unit()
    }

    pub fn below(&mut self, n: usize) -> usize {
        (self.0.next_u64() % n as u64) as usize
    }
}

/// Solves `a x = b` by Gaussian elimination with partial pivoting.
pub fn gauss_solve(mut a: Vec<Vec<f64>>, mut b: Vec<f64>) -> Vec<f64> {
    let n = b.len();
    for col in 0..n {
        let pivot = (col..n).max_by(|&i, &j| a[i][col].abs().total_cmp(&a[j][col].abs())).unwrap();
        a.swap(col, pivot);
        b.swap(col, pivot);
        let pivot_row = a[col].clone();
        for row in col + 1..n {
            let f = a[row][col] / pivot_row[col];
            for (x, p) in a[row][col..].iter_mut().zip(&pivot_row[col..]) {
                *x -= f * p;
            }
            b[row] -= f * b[col];
        }
    }
    let mut x = vec![0.0; n];
    for row in (0..n).rev() {
        let s: f64 = (row + 1..n).map(|k| a[row][k] * x[k]).sum();
        x[row] = (b[row] - s) / a[row][row];
    }
    x
}

/// Ridge weights from the dense normal equations with a centred label.
pub fn ridge_oracle(z: &Array2<f64>, y: &Array1<f64>, lambda: f64) -> Vec<f64> {
    let (n, p) = z.dim();
    let ybar = y.iter().sum::<f64>() / n as f64;
    let mut a = vec![vec![0.0; p]; p];
    let mut b = vec![0.0; p];
    for i in 0..p {
        for j in 0..p {
            a[i][j] = (0..n).map(|r| z[[r, i]] * z[[r, j]]).sum::<f64>() + if i == j { lambda } else { 0.0 };
        }
        b[i] = (0..n).map(|r| z[[r, i]] * (y[r] - ybar)).sum();
    }
    gauss_solve(a, b)
}

/// A random well-posed ridge instance: `n ≤ 50`, `p ≤ 10`, λ from `{0, 1e-3, 1}`.
pub fn random_ridge_instance(rng: &mut Rng) -> (Array2<f64>, Array1<f64>, f64) {
    let p = 1 + rng.below(10);
    let n = p + 2 + rng.below(50 - p - 1);
    let z = Array2::from_shape_fn((n, p), |_| rng.range(-3.0, 3.0));
    let y = Array1::from_shape_fn(n, |_| rng.range(-10.0, 10.0));
    let lambda = [0.0, 1e-3, 1.0][rng.below(3)];
    (z, y, lambda)
}

/// Every exponent assignment within `bounds`, no pruning, in lexicographic order.
pub fn brute_force_monomials(
    variables: &[Dimension],
    constants: &[PhysicalConstant],
    target: Dimension,
    bounds: EnumerationBounds,
) -> Vec<Monomial> {
    let limits: Vec<i32> = variables
        .iter()
        .map(|_| bounds.max_abs_exponent)
        .chain(constants.iter().map(|_| bounds.max_abs_constant_exponent))
        .collect();
    let dims: Vec<Dimension> = variables.iter().copied().chain(constants.iter().map(|c| c.dimension)).collect();
    let mut current: Vec<i32> = limits.iter().map(|l| -l).collect();
    let mut out = Vec::new();
    loop {
        let active = current[..variables.len()].iter().filter(|&&e| e != 0).count();
        if active >= 1 && active <= bounds.max_active_features {
            let d: Dimension = dims.iter().zip(&current).map(|(d, &e)| d.powi(e as i64)).product();
            if d == target {
                out.push(Monomial::new(current[..variables.len()].to_vec(), current[variables.len()..].to_vec()));
            }
        }
        // odometer, last position fastest
        let mut i = current.len();
        loop {
            if i == 0 {
                return out;
            }
            i -= 1;
            if current[i] < limits[i] {
                current[i] += 1;
                for (c, l) in current[i + 1..].iter_mut().zip(&limits[i + 1..]) {
                    *c = -l;
                }
                break;
            }
        }
    }
}

pub fn d(unit: &str) -> Dimension {
    Dimension::parse(unit).unwrap()
}
