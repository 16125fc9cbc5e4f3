mod common;

use common::{random_ridge_instance, ridge_oracle, Rng};
use nalgebra::{DMatrix, DVector, SymmetricEigen};
use ndarray::{Array1, Array2, Axis};
use pifml::regression::{gram_matrix, gram_matrix_with, ridge_fit, select_lambda, standardize_fit, RidgeModel};
use pifml::{Error, Execution};
use proptest::prelude::*;

fn rel(a: f64, b: f64, scale: f64) -> f64 {
    (a - b).abs() / scale.max(1e-12)
}

#[test]
fn matches_dense_normal_equations_on_random_instances() {
    let mut rng = Rng::new(11);
    for case in 0..100 {
        let (z, y, lambda) = random_ridge_instance(&mut rng);
        let model = ridge_fit(z.view(), y.view(), lambda).unwrap();
        let oracle = ridge_oracle(&z, &y, lambda);
        let scale = oracle.iter().fold(0.0f64, |m, v| m.max(v.abs()));
        for (j, (&b, &o)) in model.weights.iter().zip(&oracle).enumerate() {
            assert!(rel(b, o, scale) < 1e-8, "case {case} weight {j}: {b} vs {o}");
        }
        let ybar = y.mean().unwrap();
        assert!((model.intercept - ybar).abs() <= 1e-12 * ybar.abs().max(1.0));
    }
}

#[test]
fn matches_nalgebra_cholesky() {
    let mut rng = Rng::new(12);
    for _ in 0..50 {
        let (z, y, lambda) = random_ridge_instance(&mut rng);
        let (n, p) = z.dim();
        let zm = DMatrix::from_fn(n, p, |i, j| z[[i, j]]);
        let yc = DVector::from_iterator(n, y.iter().map(|v| v - y.mean().unwrap()));
        let a = zm.transpose() * &zm + DMatrix::identity(p, p) * lambda;
        let Some(chol) = a.cholesky() else { continue };
        let b = chol.solve(&(zm.transpose() * yc));
        let model = ridge_fit(z.view(), y.view(), lambda).unwrap();
        let scale = b.amax();
        for j in 0..p {
            assert!(rel(model.weights[j], b[j], scale) < 1e-8);
        }
    }
}

#[test]
fn huge_lambda_shrinks_weights_to_zero() {
    let mut rng = Rng::new(13);
    for _ in 0..20 {
        let (z, y, _) = random_ridge_instance(&mut rng);
        let small = ridge_fit(z.view(), y.view(), 1e-3).unwrap();
        let big = ridge_fit(z.view(), y.view(), 1e12).unwrap();
        let norm = |w: &Array1<f64>| w.iter().map(|v| v * v).sum::<f64>().sqrt();
        assert!(norm(&big.weights) < 1e-6 * norm(&small.weights).max(1.0));
        assert_eq!(big.intercept, small.intercept);
    }
}

#[test]
fn standardized_fit_predicts_like_a_raw_linear_model() {
    let mut rng = Rng::new(14);
    let x = Array2::from_shape_fn((60, 3), |(_, j)| rng.range(0.0, 10f64.powi(j as i32 * 3)));
    let y: Array1<f64> = x.rows().into_iter().map(|r| 2.0 * r[0] - 3e-3 * r[1] + 5e-7 * r[2] + 4.0).collect();
    let names: Vec<String> = ["a", "b", "c"].map(String::from).to_vec();
    let model = RidgeModel::fit_standardized(x.view(), y.view(), 0.0, &names).unwrap();
    let (beta, b0) = model.destandardized().unwrap();
    for (got, want) in beta.iter().zip([2.0, -3e-3, 5e-7]) {
        assert!(rel(*got, want, want.abs()) < 1e-9, "{got} vs {want}");
    }
    assert!((b0 - 4.0).abs() < 1e-6);
    let pred = model.predict_raw(x.view()).unwrap();
    for (p, t) in pred.iter().zip(&y) {
        assert!((p - t).abs() < 1e-8 * t.abs().max(1.0));
    }
    let back = RidgeModel::from_json(&model.to_json().unwrap()).unwrap();
    assert_eq!(back, model);
}

#[test]
fn rank_deficient_without_ridge_is_singular() {
    let z = Array2::from_shape_fn((10, 2), |(i, _)| i as f64);
    let y = Array1::from_shape_fn(10, |i| i as f64);
    assert!(matches!(ridge_fit(z.view(), y.view(), 0.0), Err(Error::SingularSystem)));
    assert!(ridge_fit(z.view(), y.view(), 1e-3).is_ok());
}

#[test]
fn lambda_selection_prefers_small_lambda_on_clean_data() {
    let mut rng = Rng::new(15);
    let x = Array2::from_shape_fn((200, 4), |_| rng.range(-1.0, 1.0));
    let y: Array1<f64> = x.rows().into_iter().map(|r| r[0] + 2.0 * r[1] - r[3]).collect();
    let (z, _) = standardize_fit(x.view()).unwrap();
    let grid = [1e-6, 1e-2, 1e2, 1e4];
    assert_eq!(select_lambda(z.view(), y.view(), &grid, 0.2).unwrap(), 1e-6);
}

#[test]
fn gram_is_symmetric_psd_and_mode_independent() {
    let mut rng = Rng::new(16);
    for _ in 0..30 {
        let n = 1 + rng.below(40);
        let p = 1 + rng.below(12);
        let phi = Array2::from_shape_fn((n, p), |_| rng.range(-5.0, 5.0));
        let g = gram_matrix(phi.view());
        assert_eq!(g, gram_matrix_with(phi.view(), Execution::Sequential));
        assert_eq!(g, g.t());
        let direct = phi.dot(&phi.t());
        // summation order differs; bound by p·ε·Σ|φᵢₖφⱼₖ| with |φ| ≤ 5
        let bound = 4.0 * f64::EPSILON * (p * p) as f64 * 25.0;
        assert!(g.iter().zip(&direct).all(|(a, b)| (a - b).abs() <= bound));
        let scale = direct.iter().fold(1.0f64, |m, v| m.max(v.abs()));
        let eig = SymmetricEigen::new(DMatrix::from_fn(n, n, |i, j| g[[i, j]]));
        assert!(eig.eigenvalues.iter().all(|&l| l >= -1e-10 * scale));
    }
}

proptest! {
    #[test]
    fn permuting_rows_leaves_weights_unchanged(seed in 0u64..1000) {
        let mut rng = Rng::new(seed);
        let (z, y, lambda) = random_ridge_instance(&mut rng);
        let n = z.nrows();
        let mut perm: Vec<usize> = (0..n).collect();
        for i in (1..n).rev() {
            perm.swap(i, rng.below(i + 1));
        }
        let a = ridge_fit(z.view(), y.view(), lambda).unwrap();
        let b = ridge_fit(z.select(Axis(0), &perm).view(), y.select(Axis(0), &perm).view(), lambda).unwrap();
        let scale = a.weights.iter().fold(1.0f64, |m, v| m.max(v.abs()));
        for (x, w) in a.weights.iter().zip(&b.weights) {
            prop_assert!((x - w).abs() <= 1e-8 * scale);
        }
    }

    #[test]
    fn larger_lambda_never_grows_the_weight_norm(seed in 0u64..1000, l1 in 0.0f64..10.0, extra in 0.0f64..100.0) {
        let mut rng = Rng::new(seed);
        let (z, y, _) = random_ridge_instance(&mut rng);
        let norm = |l: f64| ridge_fit(z.view(), y.view(), l).unwrap().weights.iter().map(|v| v * v).sum::<f64>();
        let l1 = l1 + 1e-6;
        prop_assert!(norm(l1 + extra) <= norm(l1) * (1.0 + 1e-9) + 1e-18);
    }
}
