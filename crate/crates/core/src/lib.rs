//! Physics-informed feature engineering for supervised learning.
//!
//! Raw features carry SI dimensions. Dimensionally homogeneous monomials of
//! those features (physics-informed features, PIFs) are enumerated or loaded
//! from a curated catalog, standardized, and fitted with closed-form ridge
//! regression. Greedy coefficient-ordered ranking picks the smallest subset
//! at which test error saturates, and de-standardization maps the fitted
//! weights back onto physical equation coefficients.
//!
//! The crate is organised bottom-up:
//!
//! - [`dimension`]: exact rational-exponent SI dimensions and the unit grammar.
//! - [`featuremap`]: monomials, feature-map specs, enumeration, evaluation, catalogs.
//! - [`regression`]: standardization, ridge regression, λ selection, Gram matrix.
//! - [`ranking`]: greedy forward selection with error saturation.
//! - [`metrics`]: MAE/MSE, confusion matrices, skill scores.
//! - [`synthdata`] and [`dataset`]: seeded generators and the CSV format.
//! - [`experiment`]: the end-to-end SF-vs-SPIF comparison and its reports.

pub mod dataset;
pub mod dimension;
pub mod error;
pub mod experiment;
pub mod featuremap;
mod linalg;
pub mod metrics;
pub mod par;
pub mod ranking;
pub mod regression;
pub mod svg;
pub mod synthdata;
mod util;

pub use dataset::{Dataset, FeatureColumn, FeatureSchema};
pub use dimension::Dimension;
pub use error::{Error, Result};
pub use featuremap::{FeatureMapSpec, Monomial, PhysicalConstant};
pub use par::Execution;
pub use regression::{RidgeModel, StandardizationParams};
