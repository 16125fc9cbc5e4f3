//! Exact dimensional algebra over the seven SI base units.
//!
//! A [`Dimension`] is a vector of rational exponents over
//! `kg, m, s, A, K, mol, cd`. Exponents are `Ratio<i64>`, always in lowest
//! terms with a positive denominator, so equality is structural and exact.

mod parse;

use std::fmt;
use std::ops::{Div, Mul};
use std::str::FromStr;

use num_rational::Ratio;
use num_traits::{One, Zero};
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};

pub use parse::UnitExpr;

pub type Exponent = Ratio<i64>;

/// Number of SI base units.
pub const BASE_COUNT: usize = 7;

/// Base unit symbols in canonical order.
pub const BASE_SYMBOLS: [&str; BASE_COUNT] = ["kg", "m", "s", "A", "K", "mol", "cd"];

#[derive(Clone, Copy, PartialEq, Eq, Hash, Default)]
pub struct Dimension([Exponent; BASE_COUNT]);

impl Dimension {
    pub const KG: usize = 0;
    pub const M: usize = 1;
    pub const S: usize = 2;
    pub const A: usize = 3;
    pub const K: usize = 4;
    pub const MOL: usize = 5;
    pub const CD: usize = 6;

    pub fn dimensionless() -> Self {
        Dimension([Exponent::zero(); BASE_COUNT])
    }

    pub fn from_exponents(exponents: [Exponent; BASE_COUNT]) -> Self {
        // Ratio arithmetic keeps values reduced; `new` normalizes anything else.
        Dimension(exponents.map(|e| Exponent::new(*e.numer(), *e.denom())))
    }

    pub fn from_ints(exponents: [i64; BASE_COUNT]) -> Self {
        Dimension(exponents.map(Exponent::from_integer))
    }

    /// Dimension of a single base unit.
    pub fn base(index: usize) -> Self {
        let mut d = Self::dimensionless();
        d.0[index] = Exponent::one();
        d
    }

    pub fn exponents(&self) -> &[Exponent; BASE_COUNT] {
        &self.0
    }

    pub fn exponent(&self, index: usize) -> Exponent {
        self.0[index]
    }

    pub fn is_dimensionless(&self) -> bool {
        self.0.iter().all(Zero::is_zero)
    }

    pub fn pow(self, q: Exponent) -> Self {
        Dimension(self.0.map(|e| e * q))
    }

    pub fn powi(self, n: i64) -> Self {
        self.pow(Exponent::from_integer(n))
    }

    pub fn recip(self) -> Self {
        Dimension(self.0.map(|e| -e))
    }

    /// Parses a unit expression such as `kg/(m*s^2)` or `T*A*m^2`.
    pub fn parse(text: &str) -> Result<Self> {
        UnitExpr::parse(text)?.dimension()
    }
}

// exponents add under multiplication and subtract under division
#[allow(clippy::suspicious_arithmetic_impl)]
impl Mul for Dimension {
    type Output = Dimension;

    fn mul(self, rhs: Dimension) -> Dimension {
        let mut out = self.0;
        for (o, r) in out.iter_mut().zip(rhs.0) {
            *o += r;
        }
        Dimension(out)
    }
}

#[allow(clippy::suspicious_arithmetic_impl)]
impl Div for Dimension {
    type Output = Dimension;

    fn div(self, rhs: Dimension) -> Dimension {
        self * rhs.recip()
    }
}

impl std::iter::Product for Dimension {
    fn product<I: Iterator<Item = Dimension>>(iter: I) -> Self {
        iter.fold(Dimension::dimensionless(), Mul::mul)
    }
}

/// Canonical product form, e.g. `kg*m^-1*s^-2`; `1` when dimensionless.
impl fmt::Display for Dimension {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut first = true;
        for (symbol, e) in BASE_SYMBOLS.iter().zip(self.0.iter()) {
            if e.is_zero() {
                continue;
            }
            if !first {
                f.write_str("*")?;
            }
            first = false;
            f.write_str(symbol)?;
            if e.is_integer() {
                if !e.is_one() {
                    write!(f, "^{}", e.numer())?;
                }
            } else {
                write!(f, "^({}/{})", e.numer(), e.denom())?;
            }
        }
        if first {
            f.write_str("1")?;
        }
        Ok(())
    }
}

impl fmt::Debug for Dimension {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Dimension({self})")
    }
}

impl FromStr for Dimension {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Dimension::parse(s)
    }
}

impl Serialize for Dimension {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        serializer.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for Dimension {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(deserializer)?;
        Dimension::parse(&s).map_err(serde::de::Error::custom)
    }
}

/// Componentwise exponent sum.
pub fn dim_mul(a: Dimension, b: Dimension) -> Dimension {
    a * b
}

/// Componentwise exponent scaling.
pub fn dim_pow(a: Dimension, q: Exponent) -> Dimension {
    a.pow(q)
}

pub fn parse_unit(text: &str) -> Result<Dimension> {
    Dimension::parse(text)
}

pub fn format_unit(d: &Dimension) -> String {
    d.to_string()
}
