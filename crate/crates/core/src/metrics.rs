//! Regression errors, confusion matrices and forecast skill scores.

use ndarray::ArrayView1;
use serde::{Deserialize, Serialize};
use serde_json::json;

use crate::error::{Error, Result};

fn check_lengths(y: ArrayView1<'_, f64>, yhat: ArrayView1<'_, f64>) -> Result<()> {
    if y.len() != yhat.len() {
        return Err(Error::LengthMismatch {
            expected: y.len(),
            found: yhat.len(),
        });
    }
    if y.is_empty() {
        return Err(Error::Empty);
    }
    Ok(())
}

/// Mean absolute error.
pub fn mae(y: ArrayView1<'_, f64>, yhat: ArrayView1<'_, f64>) -> Result<f64> {
    check_lengths(y, yhat)?;
    Ok(y.iter().zip(yhat).map(|(a, b)| (a - b).abs()).sum::<f64>() / y.len() as f64)
}

/// Mean squared error.
pub fn mse(y: ArrayView1<'_, f64>, yhat: ArrayView1<'_, f64>) -> Result<f64> {
    check_lengths(y, yhat)?;
    Ok(y.iter().zip(yhat).map(|(a, b)| (a - b) * (a - b)).sum::<f64>() / y.len() as f64)
}

/// Counts laid out as `[[tp, fp], [fn, tn]]`, positives first.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct ConfusionMatrix {
    pub tp: u64,
    pub fp: u64,
    #[serde(rename = "fn")]
    pub fn_: u64,
    pub tn: u64,
}

impl ConfusionMatrix {
    pub fn new(tp: u64, fp: u64, fn_: u64, tn: u64) -> Self {
        ConfusionMatrix { tp, fp, fn_, tn }
    }

    /// Builds from the `[[tp, fp], [fn, tn]]` layout.
    pub fn from_layout(cm: [[u64; 2]; 2]) -> Self {
        Self::new(cm[0][0], cm[0][1], cm[1][0], cm[1][1])
    }

    pub fn layout(&self) -> [[u64; 2]; 2] {
        [[self.tp, self.fp], [self.fn_, self.tn]]
    }

    pub fn total(&self) -> u64 {
        self.tp + self.fp + self.fn_ + self.tn
    }
}

fn binary<T: Copy + Into<f64>>(labels: &[T], index: usize) -> Result<bool> {
    let value: f64 = labels[index].into();
    if value == 1.0 {
        Ok(true)
    } else if value == 0.0 {
        Ok(false)
    } else {
        Err(Error::NonBinaryLabel { index, value })
    }
}

/// Tallies predictions against truth; both must hold only 0 and 1.
pub fn confusion<T: Copy + Into<f64>, U: Copy + Into<f64>>(truth: &[T], predicted: &[U]) -> Result<ConfusionMatrix> {
    if truth.len() != predicted.len() {
        return Err(Error::LengthMismatch {
            expected: truth.len(),
            found: predicted.len(),
        });
    }
    let mut cm = ConfusionMatrix::default();
    for i in 0..truth.len() {
        match (binary(truth, i)?, binary(predicted, i)?) {
            (true, true) => cm.tp += 1,
            (false, true) => cm.fp += 1,
            (true, false) => cm.fn_ += 1,
            (false, false) => cm.tn += 1,
        }
    }
    Ok(cm)
}

/// Scores with a zero denominator are `None` (undefined), never 0.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SkillScores {
    pub sensitivity: Option<f64>,
    pub specificity: Option<f64>,
    pub accuracy: Option<f64>,
    pub tss: Option<f64>,
    pub hss: Option<f64>,
}

pub const SCORE_NAMES: [&str; 5] = ["sensitivity", "specificity", "accuracy", "tss", "hss"];

impl SkillScores {
    pub fn get(&self, name: &str) -> Option<f64> {
        match name {
            "sensitivity" => self.sensitivity,
            "specificity" => self.specificity,
            "accuracy" => self.accuracy,
            "tss" => self.tss,
            "hss" => self.hss,
            _ => None,
        }
    }

    pub fn undefined(&self) -> Vec<&'static str> {
        SCORE_NAMES.into_iter().filter(|n| self.get(n).is_none()).collect()
    }
}

// Counts are far below 2^26 in practice, so numerators and denominators are
// exact in both i128 and f64 and the single division is correctly rounded.
fn ratio(num: i128, den: i128) -> Option<f64> {
    (den != 0).then(|| num as f64 / den as f64)
}

/// Sensitivity, specificity, accuracy, TSS and HSS, each formed as one exact
/// integer ratio. TSS uses `sens + spec − 1 = (tp·tn − fp·fn)/((tp+fn)(tn+fp))`.
pub fn skill_scores(cm: &ConfusionMatrix) -> SkillScores {
    let (tp, fp, fn_, tn) = (cm.tp as i128, cm.fp as i128, cm.fn_ as i128, cm.tn as i128);
    let det = tp * tn - fp * fn_;
    SkillScores {
        sensitivity: ratio(tp, tp + fn_),
        specificity: ratio(tn, tn + fp),
        accuracy: ratio(tp + tn, tp + fp + fn_ + tn),
        tss: ratio(det, (tp + fn_) * (tn + fp)),
        hss: ratio(2 * det, (tp + fn_) * (fn_ + tn) + (tp + fp) * (fp + tn)),
    }
}

/// Three-decimal rendering used in reports; undefined scores print as such.
pub fn format_score(v: Option<f64>) -> String {
    match v {
        Some(x) => format!("{x:.3}"),
        None => "undefined".to_string(),
    }
}

/// `{cm: [[tp, fp], [fn, tn]], scores: {...}, undefined: [...]}`.
pub fn skill_report(cm: &ConfusionMatrix) -> serde_json::Value {
    let scores = skill_scores(cm);
    json!({
        "cm": cm.layout(),
        "scores": scores,
        "undefined": scores.undefined(),
    })
}
