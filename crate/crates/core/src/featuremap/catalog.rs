//! Curated feature-map catalogs and the JSON spec document.

use serde::{Deserialize, Serialize};

use super::{DerivedFeature, FeatureMapSpec, Monomial, PhysicalConstant};
use crate::dataset::FeatureSchema;
use crate::error::{Error, Result};
use crate::util::to_sorted_json;

const BERNOULLI: &str = include_str!("../../catalogs/bernoulli.json");
const PULSAR: &str = include_str!("../../catalogs/pulsar.json");
const BINARY: &str = include_str!("../../catalogs/binary.json");
const FLARE: &str = include_str!("../../catalogs/flare.json");

/// On-disk form of a [`FeatureMapSpec`].
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SpecDocument {
    pub name: String,
    pub target_unit: String,
    pub features: FeatureSchema,
    #[serde(default)]
    pub derived: Vec<DerivedFeature>,
    #[serde(default)]
    pub constants: Vec<PhysicalConstant>,
    pub monomials: Vec<Monomial>,
}

impl SpecDocument {
    pub fn from_json(text: &str) -> Result<Self> {
        Ok(serde_json::from_str(text)?)
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(to_sorted_json(self)?)
    }

    pub fn into_spec(self, allow_inconsistent: bool) -> Result<FeatureMapSpec> {
        let mut features = self.features;
        features.resolve()?;
        let constants = self
            .constants
            .into_iter()
            .map(|c| PhysicalConstant::new(&c.name, c.value, &c.unit))
            .collect::<Result<Vec<_>>>()?;
        FeatureMapSpec::build(
            &self.name,
            &self.target_unit,
            features,
            self.derived,
            constants,
            self.monomials,
            allow_inconsistent,
        )
    }
}

impl FeatureMapSpec {
    pub fn to_document(&self) -> SpecDocument {
        SpecDocument {
            name: self.name.clone(),
            target_unit: self.target_unit.clone(),
            features: self.features.clone(),
            derived: self.derived.clone(),
            constants: self.constants.clone(),
            monomials: self.monomials.clone(),
        }
    }

    pub fn from_json(text: &str, allow_inconsistent: bool) -> Result<Self> {
        SpecDocument::from_json(text)?.into_spec(allow_inconsistent)
    }

    pub fn to_json(&self) -> Result<String> {
        self.to_document().to_json()
    }
}

pub fn catalog_names() -> &'static [&'static str] {
    &["bernoulli", "pulsar", "pulsar_no_pif1", "binary", "flare"]
}

/// Loads a built-in catalog. Without `allow_inconsistent`, any monomial that
/// fails its dimension check makes this return [`Error::DimensionMismatch`].
pub fn load_catalog(name: &str, allow_inconsistent: bool) -> Result<FeatureMapSpec> {
    let text = match name {
        "bernoulli" => BERNOULLI,
        "pulsar" | "pulsar_no_pif1" => PULSAR,
        "binary" => BINARY,
        "flare" => FLARE,
        other => return Err(Error::UnknownCatalog(other.to_string())),
    };
    let spec = FeatureMapSpec::from_json(text, allow_inconsistent)?;
    if name == "pulsar_no_pif1" {
        return Ok(spec.without(name, &["PIF1"]));
    }
    Ok(spec)
}
