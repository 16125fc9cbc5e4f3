//! Physics-informed feature maps.
//!
//! A [`FeatureMapSpec`] is an ordered list of [`Monomial`]s over a set of
//! input variables (raw features followed by derived features) and physical
//! constants. Each monomial should carry the dimension of the label; specs
//! loaded with `allow_inconsistent` keep offending monomials and record a
//! [`Diagnostic`] for each.

mod catalog;
mod enumerate;
mod evaluate;

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::dataset::FeatureSchema;
use crate::dimension::Dimension;
use crate::error::{Error, Result};
use crate::regression::RidgeModel;

pub use catalog::{catalog_names, load_catalog, SpecDocument};
pub use enumerate::{enumerate_monomials, EnumerationBounds, DEFAULT_CANDIDATE_CAP};
pub use evaluate::{evaluate_map, evaluate_map_with, evaluate_variables};

pub const STANDARD_GRAVITY: f64 = 9.80665;
pub const GRAVITATIONAL_CONSTANT: f64 = 6.674e-11;
pub const VACUUM_PERMEABILITY: f64 = 1.2566370614e-6;
pub const SPEED_OF_LIGHT: f64 = 2.99792458e8;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PhysicalConstant {
    pub name: String,
    pub value: f64,
    pub unit: String,
    #[serde(skip)]
    pub dimension: Dimension,
}

impl PhysicalConstant {
    pub fn new(name: &str, value: f64, unit: &str) -> Result<Self> {
        let mut c = PhysicalConstant {
            name: name.to_string(),
            value,
            unit: unit.to_string(),
            dimension: Dimension::dimensionless(),
        };
        c.resolve()?;
        Ok(c)
    }

    fn resolve(&mut self) -> Result<()> {
        if !self.value.is_finite() || self.value == 0.0 {
            return Err(Error::InvalidArgument(format!(
                "constant `{}` must be finite and nonzero",
                self.name
            )));
        }
        self.dimension = Dimension::parse(&self.unit)?;
        Ok(())
    }

    /// Standard gravity, m/s².
    pub fn g() -> Self {
        Self::new("g", STANDARD_GRAVITY, "m/s^2").expect("valid constant")
    }

    /// Newtonian constant of gravitation.
    pub fn big_g() -> Self {
        Self::new("G", GRAVITATIONAL_CONSTANT, "m^3/(kg*s^2)").expect("valid constant")
    }

    /// Vacuum magnetic permeability.
    pub fn mu0() -> Self {
        Self::new("mu0", VACUUM_PERMEABILITY, "kg*m/(A^2*s^2)").expect("valid constant")
    }

    /// Speed of light in vacuum.
    pub fn c() -> Self {
        Self::new("c", SPEED_OF_LIGHT, "m/s").expect("valid constant")
    }

    pub fn builtin(name: &str) -> Option<Self> {
        match name {
            "g" => Some(Self::g()),
            "G" => Some(Self::big_g()),
            "mu0" => Some(Self::mu0()),
            "c" => Some(Self::c()),
            _ => None,
        }
    }
}

/// Elementwise function applied to a variable before exponentiation.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Transform {
    #[default]
    Identity,
    /// `sin(x)^2`; the argument must be dimensionless.
    Sin2,
}

impl Transform {
    pub fn apply(self, x: f64) -> f64 {
        match self {
            Transform::Identity => x,
            Transform::Sin2 => {
                let s = libm::sin(x);
                s * s
            }
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Monomial {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub label: Option<String>,
    pub sign: i8,
    pub feature_exponents: Vec<i32>,
    pub constant_exponents: Vec<i32>,
    /// One per variable; empty means all identity.
    #[serde(default)]
    pub transforms: Vec<Transform>,
}

impl Monomial {
    pub fn new(feature_exponents: Vec<i32>, constant_exponents: Vec<i32>) -> Self {
        Monomial {
            label: None,
            sign: 1,
            feature_exponents,
            constant_exponents,
            transforms: Vec::new(),
        }
    }

    pub fn with_label(mut self, label: &str) -> Self {
        self.label = Some(label.to_string());
        self
    }

    pub fn negated(mut self) -> Self {
        self.sign = -self.sign;
        self
    }

    pub fn with_transform(mut self, variable: usize, transform: Transform) -> Self {
        if self.transforms.len() < self.feature_exponents.len() {
            self.transforms.resize(self.feature_exponents.len(), Transform::Identity);
        }
        self.transforms[variable] = transform;
        self
    }

    pub fn transform(&self, variable: usize) -> Transform {
        self.transforms.get(variable).copied().unwrap_or_default()
    }

    pub fn active_features(&self) -> usize {
        self.feature_exponents.iter().filter(|&&e| e != 0).count()
    }

    /// Human-readable product form such as `-B^2*r^6*sin2(alpha)*mu0^-1`.
    pub fn formula(&self, variables: &[String], constants: &[String]) -> String {
        let mut parts = Vec::new();
        let mut push = |name: String, e: i32| match e {
            0 => {}
            1 => parts.push(name),
            _ => parts.push(format!("{name}^{e}")),
        };
        for (j, (&e, name)) in self.feature_exponents.iter().zip(variables).enumerate() {
            match self.transform(j) {
                Transform::Identity => push(name.clone(), e),
                Transform::Sin2 => push(format!("sin2({name})"), e),
            }
        }
        for (&e, name) in self.constant_exponents.iter().zip(constants) {
            push(name.clone(), e);
        }
        let body = if parts.is_empty() { "1".to_string() } else { parts.join("*") };
        if self.sign < 0 {
            format!("-{body}")
        } else {
            body
        }
    }
}

/// Dimension of `m` given the dimensions of its variables and constants.
pub fn monomial_dimension(
    m: &Monomial,
    variables: &[Dimension],
    constants: &[PhysicalConstant],
) -> Result<Dimension> {
    if m.feature_exponents.len() != variables.len() {
        return Err(Error::LengthMismatch {
            expected: variables.len(),
            found: m.feature_exponents.len(),
        });
    }
    if m.constant_exponents.len() != constants.len() {
        return Err(Error::LengthMismatch {
            expected: constants.len(),
            found: m.constant_exponents.len(),
        });
    }
    if !m.transforms.is_empty() && m.transforms.len() != variables.len() {
        return Err(Error::LengthMismatch {
            expected: variables.len(),
            found: m.transforms.len(),
        });
    }
    if m.active_features() == 0 {
        return Err(Error::EmptyMonomial);
    }
    if m.sign != 1 && m.sign != -1 {
        return Err(Error::InvalidArgument(format!("monomial sign must be ±1, got {}", m.sign)));
    }
    let mut d = Dimension::dimensionless();
    for (j, (&e, &var)) in m.feature_exponents.iter().zip(variables).enumerate() {
        match m.transform(j) {
            Transform::Identity => d = d * var.powi(e as i64),
            Transform::Sin2 if var.is_dimensionless() => {}
            Transform::Sin2 => {
                return Err(Error::InvalidTransform {
                    transform: "sin2".into(),
                    feature: format!("variable {j}"),
                })
            }
        }
    }
    for (&e, c) in m.constant_exponents.iter().zip(constants) {
        d = d * c.dimension.powi(e as i64);
    }
    Ok(d)
}

/// A feature computed from raw features before monomials are formed.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DerivedFeature {
    pub name: String,
    pub unit: String,
    pub kind: DerivedKind,
    /// Set when the feature stands in for a symbol the source formula leaves undefined.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub substitution: Option<String>,
    #[serde(skip)]
    pub dimension: Dimension,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum DerivedKind {
    /// `a*b/(a+b)`.
    ReducedMass { a: String, b: String },
    /// `Π feature^exponent`.
    Product { factors: Vec<(String, i32)> },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DiagnosticKind {
    /// The monomial's dimension differs from the target.
    DimensionMismatch,
    /// The monomial uses a substituted stand-in for an undefined symbol.
    SubstitutedSymbol,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Diagnostic {
    pub index: usize,
    pub label: String,
    pub kind: DiagnosticKind,
    pub expected: Dimension,
    pub found: Dimension,
    pub message: String,
}

impl Diagnostic {
    /// `true` when the monomial fails the dimension check.
    pub fn is_inconsistent(&self) -> bool {
        self.expected != self.found
    }
}

impl fmt::Display for Diagnostic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} (#{}): {}", self.label, self.index, self.message)
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct FeatureMapSpec {
    pub name: String,
    pub target_unit: String,
    pub target: Dimension,
    pub features: FeatureSchema,
    pub derived: Vec<DerivedFeature>,
    pub constants: Vec<PhysicalConstant>,
    pub monomials: Vec<Monomial>,
    pub diagnostics: Vec<Diagnostic>,
}

impl FeatureMapSpec {
    /// Builds a spec, rejecting any monomial whose dimension is not `target`.
    pub fn new(
        name: &str,
        target_unit: &str,
        features: FeatureSchema,
        constants: Vec<PhysicalConstant>,
        monomials: Vec<Monomial>,
    ) -> Result<Self> {
        Self::build(name, target_unit, features, Vec::new(), constants, monomials, false)
    }

    pub fn build(
        name: &str,
        target_unit: &str,
        features: FeatureSchema,
        derived: Vec<DerivedFeature>,
        constants: Vec<PhysicalConstant>,
        monomials: Vec<Monomial>,
        allow_inconsistent: bool,
    ) -> Result<Self> {
        let mut spec = FeatureMapSpec {
            name: name.to_string(),
            target_unit: target_unit.to_string(),
            target: Dimension::parse(target_unit)?,
            features,
            derived,
            constants,
            monomials,
            diagnostics: Vec::new(),
        };
        spec.resolve_derived()?;
        spec.check(allow_inconsistent)?;
        Ok(spec)
    }

    fn resolve_derived(&mut self) -> Result<()> {
        let mut known: Vec<(String, Dimension)> = self
            .features
            .columns()
            .iter()
            .map(|c| (c.name.clone(), c.dimension))
            .collect();
        for d in &mut self.derived {
            let lookup = |name: &str| {
                known
                    .iter()
                    .find(|(n, _)| n == name)
                    .map(|(_, dim)| *dim)
                    .ok_or_else(|| Error::SchemaMismatch(format!("derived feature `{}` references unknown `{name}`", d.name)))
            };
            let computed = match &d.kind {
                DerivedKind::ReducedMass { a, b } => {
                    let (da, db) = (lookup(a)?, lookup(b)?);
                    if da != db {
                        return Err(Error::SchemaMismatch(format!(
                            "reduced mass `{}` combines `{a}` [{da}] and `{b}` [{db}]",
                            d.name
                        )));
                    }
                    da
                }
                DerivedKind::Product { factors } => factors
                    .iter()
                    .map(|(n, e)| lookup(n).map(|dim| dim.powi(*e as i64)))
                    .collect::<Result<Vec<_>>>()?
                    .into_iter()
                    .product(),
            };
            let declared = Dimension::parse(&d.unit)?;
            if declared != computed {
                return Err(Error::SchemaMismatch(format!(
                    "derived feature `{}` declares [{declared}] but computes to [{computed}]",
                    d.name
                )));
            }
            d.dimension = declared;
            known.push((d.name.clone(), declared));
        }
        Ok(())
    }

    fn check(&mut self, allow_inconsistent: bool) -> Result<()> {
        let dims = self.variable_dimensions();
        let names = self.variable_names();
        let consts = self.constant_names();
        let mut diagnostics = Vec::new();
        for (i, m) in self.monomials.iter().enumerate() {
            let found = monomial_dimension(m, &dims, &self.constants)?;
            let label = m.label.clone().unwrap_or_else(|| m.formula(&names, &consts));
            let substituted: Vec<&DerivedFeature> = self
                .derived
                .iter()
                .enumerate()
                .filter(|(k, d)| d.substitution.is_some() && m.feature_exponents[self.features.len() + k] != 0)
                .map(|(_, d)| d)
                .collect();
            if let Some(sub) = substituted.first() {
                let note = sub.substitution.as_deref().unwrap_or_default();
                let message = if found == self.target {
                    format!("uses substituted `{}` ({note})", sub.name)
                } else {
                    format!(
                        "uses substituted `{}` ({note}); evaluates to [{found}], expected [{}]",
                        sub.name, self.target
                    )
                };
                diagnostics.push(Diagnostic {
                    index: i,
                    label,
                    kind: DiagnosticKind::SubstitutedSymbol,
                    expected: self.target,
                    found,
                    message,
                });
            } else if found != self.target {
                diagnostics.push(Diagnostic {
                    index: i,
                    label,
                    kind: DiagnosticKind::DimensionMismatch,
                    expected: self.target,
                    found,
                    message: format!("evaluates to [{found}], expected [{}]", self.target),
                });
            }
        }
        if !allow_inconsistent && diagnostics.iter().any(Diagnostic::is_inconsistent) {
            return Err(Error::DimensionMismatch {
                spec: self.name.clone(),
                diagnostics,
            });
        }
        for d in &diagnostics {
            log::warn!("feature map `{}`: {d}", self.name);
        }
        self.diagnostics = diagnostics;
        Ok(())
    }

    /// Raw feature names followed by derived feature names.
    pub fn variable_names(&self) -> Vec<String> {
        self.features
            .columns()
            .iter()
            .map(|c| c.name.clone())
            .chain(self.derived.iter().map(|d| d.name.clone()))
            .collect()
    }

    pub fn variable_dimensions(&self) -> Vec<Dimension> {
        self.features
            .dimensions()
            .into_iter()
            .chain(self.derived.iter().map(|d| d.dimension))
            .collect()
    }

    pub fn constant_names(&self) -> Vec<String> {
        self.constants.iter().map(|c| c.name.clone()).collect()
    }

    pub fn len(&self) -> usize {
        self.monomials.len()
    }

    pub fn is_empty(&self) -> bool {
        self.monomials.is_empty()
    }

    /// Column name for each monomial: its label, or its formula.
    pub fn column_names(&self) -> Vec<String> {
        let names = self.variable_names();
        let consts = self.constant_names();
        self.monomials
            .iter()
            .map(|m| m.label.clone().unwrap_or_else(|| m.formula(&names, &consts)))
            .collect()
    }

    pub fn formulas(&self) -> Vec<String> {
        let names = self.variable_names();
        let consts = self.constant_names();
        self.monomials.iter().map(|m| m.formula(&names, &consts)).collect()
    }

    /// Same spec without the monomials whose labels appear in `labels`.
    pub fn without(&self, name: &str, labels: &[&str]) -> FeatureMapSpec {
        let keep: Vec<usize> = (0..self.monomials.len())
            .filter(|&i| !self.monomials[i].label.as_deref().is_some_and(|l| labels.contains(&l)))
            .collect();
        let remap: Vec<Option<usize>> = (0..self.monomials.len())
            .map(|i| keep.iter().position(|&k| k == i))
            .collect();
        let mut out = self.clone();
        out.name = name.to_string();
        out.monomials = keep.iter().map(|&i| self.monomials[i].clone()).collect();
        out.diagnostics = self
            .diagnostics
            .iter()
            .filter_map(|d| remap[d.index].map(|index| Diagnostic { index, ..d.clone() }))
            .collect();
        out
    }
}

/// A recovered physical equation `Σ βⱼ φⱼ(x) + β₀`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PhysicalEquation {
    pub terms: Vec<EquationTerm>,
    pub intercept: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EquationTerm {
    pub name: String,
    pub formula: String,
    pub coefficient: f64,
}

impl PhysicalEquation {
    pub fn coefficient(&self, name: &str) -> Option<f64> {
        self.terms.iter().find(|t| t.name == name).map(|t| t.coefficient)
    }
}

/// Maps standardized-space weights of `model` back to coefficients on the
/// physical monomials of `spec`: `βⱼ = bⱼ/σⱼ`, `β₀ = b₀ − Σ bⱼμⱼ/σⱼ`.
pub fn destandardize(model: &RidgeModel, spec: &FeatureMapSpec) -> Result<PhysicalEquation> {
    let (beta, intercept) = model.destandardized()?;
    let columns = spec.column_names();
    let formulas = spec.formulas();
    let terms = model
        .feature_names
        .iter()
        .zip(beta)
        .map(|(name, coefficient)| {
            let j = columns
                .iter()
                .position(|c| c == name)
                .ok_or_else(|| Error::SchemaMismatch(format!("model feature `{name}` is not a monomial of `{}`", spec.name)))?;
            Ok(EquationTerm {
                name: name.clone(),
                formula: formulas[j].clone(),
                coefficient,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(PhysicalEquation { terms, intercept })
}
