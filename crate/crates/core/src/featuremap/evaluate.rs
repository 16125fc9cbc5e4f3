use ndarray::Array2;

use super::{DerivedKind, FeatureMapSpec};
use crate::dataset::Dataset;
use crate::error::{Error, Result};
use crate::par::Execution;

/// Gathers the spec's variables from `data`: raw features by name, then
/// derived features. Returns an `n × (features + derived)` matrix.
pub fn evaluate_variables(spec: &FeatureMapSpec, data: &Dataset) -> Result<Array2<f64>> {
    let n = data.len();
    let names = spec.variable_names();
    let mut vars = Array2::zeros((n, names.len()));
    for (j, col) in spec.features.columns().iter().enumerate() {
        let src = data.schema.index_of(&col.name).ok_or_else(|| {
            Error::SchemaMismatch(format!("dataset has no feature `{}` required by `{}`", col.name, spec.name))
        })?;
        let have = data.schema.columns()[src].dimension;
        if have != col.dimension {
            return Err(Error::SchemaMismatch(format!(
                "feature `{}` is [{have}] in the dataset but [{}] in `{}`",
                col.name, col.dimension, spec.name
            )));
        }
        vars.column_mut(j).assign(&data.x.column(src));
    }
    let base = spec.features.len();
    for (k, d) in spec.derived.iter().enumerate() {
        let index = |name: &str| names[..base + k].iter().position(|n| n == name).expect("resolved at construction");
        let value: Vec<f64> = match &d.kind {
            DerivedKind::ReducedMass { a, b } => {
                let (ia, ib) = (index(a), index(b));
                vars.rows()
                    .into_iter()
                    .map(|row| row[ia] * row[ib] / (row[ia] + row[ib]))
                    .collect()
            }
            DerivedKind::Product { factors } => {
                let idx: Vec<(usize, i32)> = factors.iter().map(|(n, e)| (index(n), *e)).collect();
                vars.rows()
                    .into_iter()
                    .map(|row| idx.iter().fold(1.0, |acc, &(i, e)| acc * row[i].powi(e)))
                    .collect()
            }
        };
        for (i, v) in value.into_iter().enumerate() {
            vars[[i, base + k]] = v;
        }
    }
    Ok(vars)
}

/// Evaluates every monomial of `spec` on every row of `data` (the design
/// matrix Φ, `n × p`).
pub fn evaluate_map(spec: &FeatureMapSpec, data: &Dataset) -> Result<Array2<f64>> {
    evaluate_map_with(spec, data, Execution::default())
}

pub fn evaluate_map_with(spec: &FeatureMapSpec, data: &Dataset, exec: Execution) -> Result<Array2<f64>> {
    let vars = evaluate_variables(spec, data)?;
    let n = vars.nrows();
    let p = spec.monomials.len();
    let constants: Vec<f64> = spec.constants.iter().map(|c| c.value).collect();
    let rows: Vec<Result<Vec<f64>>> = exec.map_range(n, |i| {
        let row = vars.row(i);
        spec.monomials
            .iter()
            .enumerate()
            .map(|(j, m)| {
                let mut value = f64::from(m.sign);
                for (v, (&e, &x)) in m.feature_exponents.iter().zip(row.iter()).enumerate() {
                    if e == 0 {
                        continue;
                    }
                    let t = m.transform(v).apply(x);
                    if e < 0 && t == 0.0 {
                        return Err(Error::DivisionByZero { row: i, monomial: j });
                    }
                    value = apply_power(value, t, e);
                }
                for (&e, &c) in m.constant_exponents.iter().zip(&constants) {
                    if e != 0 {
                        value = apply_power(value, c, e);
                    }
                }
                if !value.is_finite() {
                    return Err(Error::NonFiniteResult { row: i, monomial: j });
                }
                Ok(value)
            })
            .collect()
    });
    let mut phi = Array2::zeros((n, p));
    for (i, row) in rows.into_iter().enumerate() {
        for (j, v) in row?.into_iter().enumerate() {
            phi[[i, j]] = v;
        }
    }
    Ok(phi)
}

/// `acc · base^e`, dividing for negative `e` so single quotients stay correctly rounded.
fn apply_power(acc: f64, base: f64, e: i32) -> f64 {
    if e > 0 {
        acc * base.powi(e)
    } else {
        acc / base.powi(-e)
    }
}
