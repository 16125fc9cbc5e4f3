//! Enumeration of dimensionally homogeneous monomials.
//!
//! Depth-first search over integer exponent assignments, variables first and
//! constants last, each tried in ascending order so results come out in
//! lexicographic order of the concatenated exponent vector. A branch is cut
//! when some base-unit residual can no longer be cancelled by the remaining
//! variables within their exponent bounds.

use serde::{Deserialize, Serialize};

use super::{Monomial, PhysicalConstant};
use crate::dimension::{Dimension, Exponent, BASE_COUNT};
use crate::error::{Error, Result};

pub const DEFAULT_CANDIDATE_CAP: usize = 1_000_000;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct EnumerationBounds {
    pub max_abs_exponent: i32,
    pub max_active_features: usize,
    /// Separate exponent budget for physical constants.
    pub max_abs_constant_exponent: i32,
    pub cap: usize,
}

impl EnumerationBounds {
    pub fn new(max_abs_exponent: i32, max_active_features: usize) -> Self {
        EnumerationBounds {
            max_abs_exponent,
            max_active_features,
            max_abs_constant_exponent: 1,
            cap: DEFAULT_CANDIDATE_CAP,
        }
    }

    pub fn with_cap(mut self, cap: usize) -> Self {
        self.cap = cap;
        self
    }

    pub fn with_constant_exponent(mut self, bound: i32) -> Self {
        self.max_abs_constant_exponent = bound;
        self
    }
}

impl Default for EnumerationBounds {
    fn default() -> Self {
        Self::new(2, 3)
    }
}

/// All monomials over `variables` and `constants` with dimension `target`
/// within `bounds`, in lexicographic exponent order.
pub fn enumerate_monomials(
    variables: &[Dimension],
    constants: &[PhysicalConstant],
    target: Dimension,
    bounds: EnumerationBounds,
) -> Result<Vec<Monomial>> {
    if bounds.max_abs_exponent < 1 || bounds.max_active_features < 1 {
        return Err(Error::InvalidArgument(
            "max_abs_exponent and max_active_features must be at least 1".into(),
        ));
    }
    if bounds.max_abs_constant_exponent < 0 {
        return Err(Error::InvalidArgument("constant exponent bound must be nonnegative".into()));
    }
    let n_var = variables.len();
    let dims: Vec<Dimension> = variables
        .iter()
        .copied()
        .chain(constants.iter().map(|c| c.dimension))
        .collect();
    let limits: Vec<i32> = (0..dims.len())
        .map(|i| if i < n_var { bounds.max_abs_exponent } else { bounds.max_abs_constant_exponent })
        .collect();

    // reach[i][k]: largest |exponent sum| in base unit k achievable by positions i..
    let mut reach = vec![[Exponent::from_integer(0); BASE_COUNT]; dims.len() + 1];
    for i in (0..dims.len()).rev() {
        let next = reach[i + 1];
        for (k, slot) in reach[i].iter_mut().enumerate() {
            let e = dims[i].exponent(k);
            let abs = if e < Exponent::from_integer(0) { -e } else { e };
            *slot = next[k] + abs * Exponent::from_integer(limits[i] as i64);
        }
    }

    let mut search = Search {
        n_var,
        dims: &dims,
        limits: &limits,
        reach: &reach,
        max_active: bounds.max_active_features,
        cap: bounds.cap,
        current: vec![0; dims.len()],
        out: Vec::new(),
    };
    search.visit(0, target, 0)?;
    Ok(search.out)
}

struct Search<'a> {
    n_var: usize,
    dims: &'a [Dimension],
    limits: &'a [i32],
    reach: &'a [[Exponent; BASE_COUNT]],
    max_active: usize,
    cap: usize,
    current: Vec<i32>,
    out: Vec<Monomial>,
}

impl Search<'_> {
    fn feasible(&self, position: usize, residual: &Dimension) -> bool {
        (0..BASE_COUNT).all(|k| {
            let r = residual.exponent(k);
            let abs = if r < Exponent::from_integer(0) { -r } else { r };
            abs <= self.reach[position][k]
        })
    }

    fn visit(&mut self, position: usize, residual: Dimension, active: usize) -> Result<()> {
        if position == self.dims.len() {
            if residual.is_dimensionless() && active > 0 {
                if self.out.len() >= self.cap {
                    return Err(Error::BudgetExceeded { cap: self.cap });
                }
                self.out.push(Monomial::new(
                    self.current[..self.n_var].to_vec(),
                    self.current[self.n_var..].to_vec(),
                ));
            }
            return Ok(());
        }
        if !self.feasible(position, &residual) {
            return Ok(());
        }
        let is_var = position < self.n_var;
        let limit = self.limits[position];
        let unit = self.dims[position];
        for e in -limit..=limit {
            let next_active = active + usize::from(is_var && e != 0);
            if next_active > self.max_active {
                continue;
            }
            self.current[position] = e;
            self.visit(position + 1, residual / unit.powi(e as i64), next_active)?;
        }
        self.current[position] = 0;
        Ok(())
    }
}
