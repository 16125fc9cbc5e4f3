//! Datasets with dimensioned columns and their CSV/manifest file formats.
//!
//! CSV layout: UTF-8, `\n` line endings, header cells `name[unit]`, the
//! label column last and named `label`. Values are written with Rust's
//! shortest round-trip float formatting, so a write/read cycle is exact.

use std::fs::File;
use std::io::{BufWriter, Read, Write};
use std::path::{Path, PathBuf};

use ndarray::{s, Array1, Array2};
use serde::{Deserialize, Serialize};

use crate::dimension::Dimension;
use crate::error::{Error, Result};
use crate::synthdata::NoiseConfig;
use crate::util::to_sorted_json;

pub const LABEL_COLUMN: &str = "label";

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FeatureColumn {
    pub name: String,
    pub unit: String,
    #[serde(skip)]
    pub dimension: Dimension,
}

impl FeatureColumn {
    pub fn new(name: impl Into<String>, unit: impl Into<String>) -> Result<Self> {
        let unit = unit.into();
        let dimension = Dimension::parse(&unit)?;
        Ok(FeatureColumn {
            name: name.into(),
            unit,
            dimension,
        })
    }

    /// Re-derives `dimension` from `unit` (after deserialization).
    pub(crate) fn resolve(&mut self) -> Result<()> {
        self.dimension = Dimension::parse(&self.unit)?;
        Ok(())
    }
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct FeatureSchema(pub Vec<FeatureColumn>);

impl FeatureSchema {
    pub fn new(columns: Vec<FeatureColumn>) -> Self {
        FeatureSchema(columns)
    }

    /// Builds a schema from `(name, unit)` pairs.
    pub fn from_units(pairs: &[(&str, &str)]) -> Result<Self> {
        pairs
            .iter()
            .map(|(n, u)| FeatureColumn::new(*n, *u))
            .collect::<Result<Vec<_>>>()
            .map(FeatureSchema)
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn columns(&self) -> &[FeatureColumn] {
        &self.0
    }

    pub fn names(&self) -> Vec<String> {
        self.0.iter().map(|c| c.name.clone()).collect()
    }

    pub fn dimensions(&self) -> Vec<Dimension> {
        self.0.iter().map(|c| c.dimension).collect()
    }

    pub fn index_of(&self, name: &str) -> Option<usize> {
        self.0.iter().position(|c| c.name == name)
    }

    pub(crate) fn resolve(&mut self) -> Result<()> {
        self.0.iter_mut().try_for_each(FeatureColumn::resolve)
    }

    /// Parses a JSON array of `{"name", "unit"}` objects.
    pub fn from_json(text: &str) -> Result<Self> {
        let mut schema: FeatureSchema = serde_json::from_str(text)?;
        schema.resolve()?;
        Ok(schema)
    }

    /// Parses the header line of a dataset CSV. A trailing `label` column is dropped.
    pub fn from_csv_header(line: &str) -> Result<Self> {
        let mut r = csv::ReaderBuilder::new().has_headers(false).from_reader(line.as_bytes());
        let record = r
            .records()
            .next()
            .ok_or_else(|| Error::Format("empty CSV header".into()))??;
        let mut cells: Vec<(String, String)> = record.iter().map(parse_header_cell).collect::<Result<_>>()?;
        if cells.last().is_some_and(|(name, _)| name == LABEL_COLUMN) {
            cells.pop();
        }
        cells.into_iter().map(|(n, u)| FeatureColumn::new(n, u)).collect::<Result<_>>().map(FeatureSchema)
    }
}

/// Where a dataset came from; written as the JSON sidecar manifest.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct Provenance {
    pub generator: String,
    pub n: usize,
    pub seed: u64,
    pub ranges: serde_json::Value,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub noise: Option<NoiseConfig>,
    /// Labels were divided by `10^label_scale_exponent`.
    #[serde(default)]
    pub label_scale_exponent: i32,
    #[serde(default)]
    pub notes: Vec<String>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Dataset {
    pub schema: FeatureSchema,
    pub x: Array2<f64>,
    pub y: Array1<f64>,
    pub label_unit: String,
    pub label_dimension: Dimension,
    pub provenance: Option<Provenance>,
}

impl Dataset {
    pub fn new(schema: FeatureSchema, x: Array2<f64>, y: Array1<f64>, label_unit: &str) -> Result<Self> {
        if x.ncols() != schema.len() {
            return Err(Error::ColumnMismatch {
                expected: schema.len(),
                found: x.ncols(),
            });
        }
        if x.nrows() != y.len() {
            return Err(Error::LengthMismatch {
                expected: x.nrows(),
                found: y.len(),
            });
        }
        if x.iter().chain(y.iter()).any(|v| !v.is_finite()) {
            return Err(Error::NonFiniteInput);
        }
        Ok(Dataset {
            schema,
            x,
            y,
            label_unit: label_unit.to_string(),
            label_dimension: Dimension::parse(label_unit)?,
            provenance: None,
        })
    }

    pub fn with_provenance(mut self, provenance: Provenance) -> Self {
        self.provenance = Some(provenance);
        self
    }

    pub fn len(&self) -> usize {
        self.y.len()
    }

    pub fn is_empty(&self) -> bool {
        self.y.is_empty()
    }

    pub fn column(&self, name: &str) -> Option<ndarray::ArrayView1<'_, f64>> {
        self.schema.index_of(name).map(|j| self.x.column(j))
    }

    /// Number of leading rows that form the training part of a chronological split.
    pub fn split_point(n: usize, train_fraction: f64) -> Result<usize> {
        if !(train_fraction > 0.0 && train_fraction < 1.0) {
            return Err(Error::InvalidArgument(format!(
                "split fraction {train_fraction} must lie in (0, 1)"
            )));
        }
        let k = (n as f64 * train_fraction).round() as usize;
        if k == 0 || k == n {
            return Err(Error::InsufficientData(format!(
                "{n} rows cannot be split at fraction {train_fraction}"
            )));
        }
        Ok(k)
    }

    /// Chronological split: the first `round(n * train_fraction)` rows train.
    pub fn split(&self, train_fraction: f64) -> Result<(Dataset, Dataset)> {
        let k = Self::split_point(self.len(), train_fraction)?;
        let part = |rows: std::ops::Range<usize>| Dataset {
            schema: self.schema.clone(),
            x: self.x.slice(s![rows.clone(), ..]).to_owned(),
            y: self.y.slice(s![rows]).to_owned(),
            label_unit: self.label_unit.clone(),
            label_dimension: self.label_dimension,
            provenance: self.provenance.clone(),
        };
        Ok((part(0..k), part(k..self.len())))
    }

    pub fn write_csv<W: Write>(&self, writer: W) -> Result<()> {
        let mut w = csv::WriterBuilder::new()
            .terminator(csv::Terminator::Any(b'\n'))
            .from_writer(writer);
        let mut header: Vec<String> = self
            .schema
            .columns()
            .iter()
            .map(|c| format!("{}[{}]", c.name, c.unit))
            .collect();
        header.push(format!("{LABEL_COLUMN}[{}]", self.label_unit));
        w.write_record(&header)?;
        for (row, label) in self.x.rows().into_iter().zip(self.y.iter()) {
            let mut record: Vec<String> = row.iter().map(|v| format!("{v:?}")).collect();
            record.push(format!("{label:?}"));
            w.write_record(&record)?;
        }
        w.flush()?;
        Ok(())
    }

    pub fn read_csv<R: Read>(reader: R) -> Result<Self> {
        let mut r = csv::ReaderBuilder::new().has_headers(true).from_reader(reader);
        let headers = r.headers()?.clone();
        let mut cells: Vec<(String, String)> = headers
            .iter()
            .map(parse_header_cell)
            .collect::<Result<_>>()?;
        let (label_name, label_unit) = cells
            .pop()
            .ok_or_else(|| Error::Format("CSV has no columns".into()))?;
        if label_name != LABEL_COLUMN {
            return Err(Error::Format(format!(
                "last column must be `{LABEL_COLUMN}`, found `{label_name}`"
            )));
        }
        let schema = FeatureSchema(
            cells
                .into_iter()
                .map(|(n, u)| FeatureColumn::new(n, u))
                .collect::<Result<_>>()?,
        );
        let m = schema.len();
        let mut values = Vec::new();
        let mut labels = Vec::new();
        for (i, record) in r.records().enumerate() {
            let record = record?;
            if record.len() != m + 1 {
                return Err(Error::Format(format!(
                    "row {} has {} fields, expected {}",
                    i + 1,
                    record.len(),
                    m + 1
                )));
            }
            for (j, field) in record.iter().enumerate() {
                let v: f64 = field.trim().parse().map_err(|_| {
                    Error::Format(format!("row {}, column {}: `{field}` is not a number", i + 1, j + 1))
                })?;
                if j < m {
                    values.push(v);
                } else {
                    labels.push(v);
                }
            }
        }
        let n = labels.len();
        let x = Array2::from_shape_vec((n, m), values).map_err(|e| Error::Format(e.to_string()))?;
        Dataset::new(schema, x, Array1::from(labels), &label_unit)
    }

    /// Writes `<path>` and, when provenance is present, `<path stem>.manifest.json`.
    pub fn save(&self, path: &Path) -> Result<()> {
        let file = File::create(path)?;
        self.write_csv(BufWriter::new(file))?;
        if let Some(p) = &self.provenance {
            std::fs::write(manifest_path(path), to_sorted_json(p)?)?;
        }
        Ok(())
    }

    /// Reads a CSV and its sidecar manifest if one exists.
    pub fn load(path: &Path) -> Result<Self> {
        let mut ds = Dataset::read_csv(File::open(path)?)?;
        let manifest = manifest_path(path);
        if manifest.exists() {
            let text = std::fs::read_to_string(manifest)?;
            ds.provenance = Some(serde_json::from_str(&text)?);
        }
        Ok(ds)
    }
}

pub fn manifest_path(csv_path: &Path) -> PathBuf {
    csv_path.with_extension("manifest.json")
}

fn parse_header_cell(cell: &str) -> Result<(String, String)> {
    let cell = cell.trim();
    let open = cell
        .find('[')
        .ok_or_else(|| Error::Format(format!("header `{cell}` lacks a `[unit]` suffix")))?;
    if !cell.ends_with(']') {
        return Err(Error::Format(format!("header `{cell}` must end with `]`")));
    }
    let name = cell[..open].trim();
    if name.is_empty() {
        return Err(Error::Format(format!("header `{cell}` has an empty name")));
    }
    Ok((name.to_string(), cell[open + 1..cell.len() - 1].trim().to_string()))
}
