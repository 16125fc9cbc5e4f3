//! End-to-end SF-vs-SPIF comparison over noise levels and seeds.
//!
//! A trial generates one dataset, splits it chronologically, and fits every
//! arm (raw standardized features, standardized PIFs, and for the pulsar
//! ablation the PIFs without PIF1) with ridge regression. Regression arms
//! on PIFs also run the greedy ranking and de-standardize the selected
//! model. Trials are independent and may run in parallel; results are
//! always sorted by noise level and seed before aggregation.

use std::collections::BTreeMap;
use std::f64::consts::PI;
use std::fmt::{self, Write as _};
use std::fs;
use std::path::{Path, PathBuf};

use ndarray::{s, Array2, ArrayView1, ArrayView2, Axis};
use serde::{Deserialize, Serialize};

use crate::dataset::Dataset;
use crate::error::{Error, Result};
use crate::featuremap::{evaluate_map_with, load_catalog, FeatureMapSpec};
use crate::metrics::{confusion, format_score, mae, mse, skill_scores, ConfusionMatrix, SkillScores, SCORE_NAMES};
use crate::par::Execution;
use crate::ranking::{greedy_select_with, rank_by_coefficient, RankingResult, DEFAULT_EPSILON};
use crate::regression::{
    classify, ridge_fit, select_lambda, standardize_fit, RidgeModel, StandardizationParams, DEFAULT_LAMBDA, DEFAULT_THRESHOLD,
};
use crate::svg::box_plot;
use crate::synthdata::{Generator, NoiseConfig, DEFAULT_N, DEFAULT_PULSAR_LABEL_SCALE};
use crate::util::{median, quantile, to_sorted_json};

pub const DEFAULT_TRAIN_FRACTION: f64 = 0.7;
pub const DEFAULT_VALIDATION_FRACTION: f64 = 0.2;
pub const DEFAULT_NOISE_LEVELS: [f64; 3] = [0.1, 0.3, 0.5];
pub const DEFAULT_SEED_COUNT: u64 = 20;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ExperimentManifest {
    pub experiment: Generator,
    pub n: usize,
    pub seeds: Vec<u64>,
    pub noise_levels: Vec<f64>,
    pub train_fraction: f64,
    pub lambda: f64,
    /// When set, λ is chosen per fit on a validation tail of the training rows.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub lambda_grid: Option<Vec<f64>>,
    pub validation_fraction: f64,
    pub epsilon: f64,
    pub threshold: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub output: Option<PathBuf>,
}

impl ExperimentManifest {
    /// Protocol defaults: 1000 rows, 70/30 split, seeds 1..=20, noise 10/30/50 %
    /// (a single noiseless level for the classification experiment).
    pub fn new(experiment: Generator) -> Self {
        ExperimentManifest {
            experiment,
            n: DEFAULT_N,
            seeds: (1..=DEFAULT_SEED_COUNT).collect(),
            noise_levels: if experiment.is_classification() { vec![0.0] } else { DEFAULT_NOISE_LEVELS.to_vec() },
            train_fraction: DEFAULT_TRAIN_FRACTION,
            lambda: DEFAULT_LAMBDA,
            lambda_grid: None,
            validation_fraction: DEFAULT_VALIDATION_FRACTION,
            epsilon: DEFAULT_EPSILON,
            threshold: DEFAULT_THRESHOLD,
            output: None,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.train_fraction > 0.0 && self.train_fraction < 1.0) {
            return Err(Error::InvalidArgument(format!("split must be in (0, 1), got {}", self.train_fraction)));
        }
        if self.seeds.is_empty() {
            return Err(Error::InvalidArgument("at least one seed is required".into()));
        }
        if self.noise_levels.is_empty() {
            return Err(Error::InvalidArgument("at least one noise level is required".into()));
        }
        for &level in &self.noise_levels {
            NoiseConfig::new(level, 0)?;
        }
        if self.epsilon.is_nan() || self.epsilon <= 0.0 {
            return Err(Error::InvalidArgument(format!("epsilon must be positive, got {}", self.epsilon)));
        }
        if !(self.lambda >= 0.0 && self.lambda.is_finite()) {
            return Err(Error::InvalidArgument(format!("lambda must be finite and >= 0, got {}", self.lambda)));
        }
        if matches!(&self.lambda_grid, Some(g) if g.is_empty()) {
            return Err(Error::InvalidArgument("lambda grid is empty".into()));
        }
        Dataset::split_point(self.n, self.train_fraction)?;
        Ok(())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Arm {
    #[serde(rename = "SF")]
    Sf,
    #[serde(rename = "SPIF")]
    Spif,
    #[serde(rename = "SPIF without PIF1")]
    SpifWithoutPif1,
}

impl Arm {
    pub fn name(self) -> &'static str {
        match self {
            Arm::Sf => "SF",
            Arm::Spif => "SPIF",
            Arm::SpifWithoutPif1 => "SPIF without PIF1",
        }
    }

    fn catalog(self, experiment: Generator) -> Option<&'static str> {
        match (self, experiment) {
            (Arm::Sf, _) => None,
            (Arm::Spif, g) => Some(g.name()),
            (Arm::SpifWithoutPif1, _) => Some("pulsar_no_pif1"),
        }
    }
}

impl fmt::Display for Arm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// Arms compared for each experiment, in report order.
pub fn arms(experiment: Generator) -> Vec<Arm> {
    match experiment {
        Generator::Pulsar => vec![Arm::Spif, Arm::SpifWithoutPif1, Arm::Sf],
        _ => vec![Arm::Sf, Arm::Spif],
    }
}

/// Coefficients the generator's label equation assigns to catalog PIFs.
pub fn ground_truth(experiment: Generator) -> Vec<(&'static str, f64)> {
    match experiment {
        Generator::Bernoulli => vec![("PIF1", 1.0), ("PIF2", 0.5), ("PIF3", 1.0)],
        Generator::Pulsar => vec![("PIF1", 2.0 * PI / 3.0 / libm::pow(10.0, f64::from(DEFAULT_PULSAR_LABEL_SCALE)))],
        Generator::Binary => vec![],
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ArmResult {
    pub arm: Arm,
    pub lambda: f64,
    pub mae: f64,
    pub mse: f64,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub dropped_columns: Vec<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub confusion: Option<ConfusionMatrix>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub scores: Option<SkillScores>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub ranking: Option<RankingResult>,
    /// Physical coefficients of the model refitted on the selected columns.
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub selected_coefficients: BTreeMap<String, f64>,
    /// Physical coefficients of the full model.
    #[serde(default)]
    pub coefficients: BTreeMap<String, f64>,
    pub intercept: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TrialResult {
    pub noise: f64,
    pub seed: u64,
    pub arms: Vec<ArmResult>,
}

impl TrialResult {
    pub fn arm(&self, arm: Arm) -> Option<&ArmResult> {
        self.arms.iter().find(|a| a.arm == arm)
    }
}

/// First quartile, median and third quartile over seeds.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Spread {
    pub q1: f64,
    pub median: f64,
    pub q3: f64,
}

impl Spread {
    fn of(values: &[f64]) -> Option<Spread> {
        if values.iter().all(|v| v.is_nan()) {
            return None;
        }
        Some(Spread {
            q1: quantile(values, 0.25),
            median: median(values),
            q3: quantile(values, 0.75),
        })
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ArmSummary {
    pub noise: f64,
    pub arm: Arm,
    pub mae: Spread,
    pub mse: Spread,
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub scores: BTreeMap<String, Option<Spread>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub pooled_confusion: Option<ConfusionMatrix>,
    /// Seeds per selected count.
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub selected_count_histogram: BTreeMap<usize, usize>,
    /// Fraction of seeds in which each column is selected.
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub selection_frequency: BTreeMap<String, f64>,
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub selected_coefficients: BTreeMap<String, Spread>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ExperimentReport {
    pub manifest: ExperimentManifest,
    pub catalog_diagnostics: Vec<String>,
    pub formulas: BTreeMap<String, String>,
    pub trials: Vec<TrialResult>,
    pub summary: Vec<ArmSummary>,
}

struct ArmSetup {
    arm: Arm,
    spec: Option<FeatureMapSpec>,
}

/// Runs every (noise level, seed) trial of the manifest.
pub fn run_experiment(manifest: &ExperimentManifest, exec: Execution) -> Result<ExperimentReport> {
    manifest.validate()?;
    let mut diagnostics = Vec::new();
    let mut formulas = BTreeMap::new();
    let setups = arms(manifest.experiment)
        .into_iter()
        .map(|arm| {
            let spec = match arm.catalog(manifest.experiment) {
                Some(name) => {
                    let spec = load_catalog(name, true)?;
                    for d in &spec.diagnostics {
                        let line = format!("{name} {}: {}", d.label, d.message);
                        if !diagnostics.contains(&line) {
                            diagnostics.push(line);
                        }
                    }
                    for (c, f) in spec.column_names().into_iter().zip(spec.formulas()) {
                        formulas.insert(c, f);
                    }
                    Some(spec)
                }
                None => None,
            };
            Ok(ArmSetup { arm, spec })
        })
        .collect::<Result<Vec<_>>>()?;

    let mut jobs: Vec<(f64, u64)> = manifest
        .noise_levels
        .iter()
        .flat_map(|&noise| manifest.seeds.iter().map(move |&seed| (noise, seed)))
        .collect();
    jobs.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)));
    jobs.dedup();
    let trials = exec
        .map_slice(&jobs, |&(noise, seed)| run_trial(manifest, &setups, noise, seed))
        .into_iter()
        .collect::<Result<Vec<_>>>()?;
    let summary = summarize(manifest, &trials);
    Ok(ExperimentReport {
        manifest: manifest.clone(),
        catalog_diagnostics: diagnostics,
        formulas,
        trials,
        summary,
    })
}

fn run_trial(m: &ExperimentManifest, setups: &[ArmSetup], noise: f64, seed: u64) -> Result<TrialResult> {
    let data = m.experiment.generate(m.n, seed, noise)?;
    let cut = Dataset::split_point(data.len(), m.train_fraction)?;
    let arms = setups
        .iter()
        .map(|setup| {
            let (x, names) = match &setup.spec {
                Some(spec) => (evaluate_map_with(spec, &data, Execution::Sequential)?, spec.column_names()),
                None => (data.x.clone(), data.schema.names()),
            };
            fit_arm(m, setup.arm, &x, &names, data.y.view(), cut)
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(TrialResult { noise, seed, arms })
}

fn fit_arm(m: &ExperimentManifest, arm: Arm, x: &Array2<f64>, names: &[String], y: ArrayView1<'_, f64>, cut: usize) -> Result<ArmResult> {
    let (yt, yv) = (y.slice(s![..cut]), y.slice(s![cut..]));
    let grid = m.lambda_grid.as_deref().map(|g| (g, m.validation_fraction));
    let SplitFit { model, z_train: zt, z_test: zv } = fit_split(x, names, y, cut, m.lambda, grid)?;
    let lambda = model.lambda;
    let dropped_columns = model.standardization.dropped().iter().map(|&j| names[j].clone()).collect();
    let pred = model.predict(zv.view())?;

    let (beta, intercept) = model.destandardized()?;
    let coefficients = model.feature_names.iter().cloned().zip(beta).collect();
    let mut result = ArmResult {
        arm,
        lambda,
        mae: mae(yv, pred.view())?,
        mse: mse(yv, pred.view())?,
        dropped_columns,
        confusion: None,
        scores: None,
        ranking: None,
        selected_coefficients: BTreeMap::new(),
        coefficients,
        intercept,
    };

    if m.experiment.is_classification() {
        let labels = classify(pred.as_slice().expect("contiguous"), m.threshold);
        let truth: Vec<f64> = yv.to_vec();
        let cm = confusion(&truth, &labels)?;
        result.scores = Some(skill_scores(&cm));
        result.confusion = Some(cm);
    } else if arm == Arm::Spif {
        let order = rank_by_coefficient(&model);
        let ranking = greedy_select_with(zt.view(), yt, zv.view(), yv, lambda, &order, m.epsilon, Execution::Sequential)?;
        let sub = refit_columns(&model, zt.view(), yt, ranking.selected())?;
        let (beta, _) = sub.destandardized()?;
        result.selected_coefficients = sub.feature_names.iter().cloned().zip(beta).collect();
        result.ranking = Some(ranking);
    }
    Ok(result)
}

fn summarize(m: &ExperimentManifest, trials: &[TrialResult]) -> Vec<ArmSummary> {
    let mut out = Vec::new();
    let mut levels = m.noise_levels.clone();
    levels.sort_by(f64::total_cmp);
    levels.dedup();
    for &noise in &levels {
        let at: Vec<&TrialResult> = trials.iter().filter(|t| t.noise == noise).collect();
        for arm in arms(m.experiment) {
            let results: Vec<&ArmResult> = at.iter().filter_map(|t| t.arm(arm)).collect();
            let collect = |f: &dyn Fn(&ArmResult) -> f64| results.iter().map(|r| f(r)).collect::<Vec<f64>>();
            let nan = Spread {
                q1: f64::NAN,
                median: f64::NAN,
                q3: f64::NAN,
            };
            let mut summary = ArmSummary {
                noise,
                arm,
                mae: Spread::of(&collect(&|r| r.mae)).unwrap_or(nan),
                mse: Spread::of(&collect(&|r| r.mse)).unwrap_or(nan),
                scores: BTreeMap::new(),
                pooled_confusion: None,
                selected_count_histogram: BTreeMap::new(),
                selection_frequency: BTreeMap::new(),
                selected_coefficients: BTreeMap::new(),
            };
            if m.experiment.is_classification() {
                for name in SCORE_NAMES {
                    let values = collect(&|r| r.scores.and_then(|s| s.get(name)).unwrap_or(f64::NAN));
                    summary.scores.insert(name.to_string(), Spread::of(&values));
                }
                let mut pooled = ConfusionMatrix::default();
                for cm in results.iter().filter_map(|r| r.confusion) {
                    pooled.tp += cm.tp;
                    pooled.fp += cm.fp;
                    pooled.fn_ += cm.fn_;
                    pooled.tn += cm.tn;
                }
                summary.pooled_confusion = Some(pooled);
            }
            let ranked: Vec<&ArmResult> = results.iter().copied().filter(|r| r.ranking.is_some()).collect();
            if !ranked.is_empty() {
                let mut names: Vec<String> = Vec::new();
                for r in &ranked {
                    let count = r.ranking.as_ref().map_or(0, |k| k.selected_count);
                    *summary.selected_count_histogram.entry(count).or_default() += 1;
                    for name in r.coefficients.keys() {
                        if !names.contains(name) {
                            names.push(name.clone());
                        }
                    }
                }
                for name in names {
                    let hits = ranked.iter().filter(|r| r.selected_coefficients.contains_key(&name)).count();
                    summary.selection_frequency.insert(name.clone(), hits as f64 / ranked.len() as f64);
                    let values: Vec<f64> = ranked.iter().filter_map(|r| r.selected_coefficients.get(&name).copied()).collect();
                    if let Some(sp) = Spread::of(&values) {
                        summary.selected_coefficients.insert(name, sp);
                    }
                }
            }
            out.push(summary);
        }
    }
    out
}

fn pct(noise: f64) -> String {
    format!("{}", (noise * 100.0).round() as i64)
}

fn g4(v: f64) -> String {
    if v.is_nan() {
        "n/a".into()
    } else if v != 0.0 && (v.abs() >= 1e4 || v.abs() < 1e-3) {
        format!("{v:.3e}")
    } else {
        format!("{v:.4}")
    }
}

impl ExperimentReport {
    pub fn summary_for(&self, noise: f64, arm: Arm) -> Option<&ArmSummary> {
        self.summary.iter().find(|s| s.noise == noise && s.arm == arm)
    }

    fn noise_levels(&self) -> Vec<f64> {
        let mut v: Vec<f64> = self.summary.iter().map(|s| s.noise).collect();
        v.dedup();
        v
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(to_sorted_json(self)?)
    }

    /// One row per (noise, seed, arm).
    pub fn trials_csv(&self) -> String {
        let classification = self.manifest.experiment.is_classification();
        let mut out = String::from("noise,seed,arm,lambda,mae,mse");
        if classification {
            out.push_str(",tp,fp,fn,tn");
            for name in SCORE_NAMES {
                out.push(',');
                out.push_str(name);
            }
        } else {
            out.push_str(",selected_count");
        }
        out.push('\n');
        for t in &self.trials {
            for a in &t.arms {
                let _ = write!(out, "{:?},{},{},{:?},{:?},{:?}", t.noise, t.seed, a.arm, a.lambda, a.mae, a.mse);
                if classification {
                    let cm = a.confusion.unwrap_or_default();
                    let _ = write!(out, ",{},{},{},{}", cm.tp, cm.fp, cm.fn_, cm.tn);
                    for name in SCORE_NAMES {
                        match a.scores.and_then(|s| s.get(name)) {
                            Some(v) => {
                                let _ = write!(out, ",{v:?}");
                            }
                            None => out.push_str(",undefined"),
                        }
                    }
                } else if let Some(r) = &a.ranking {
                    let _ = write!(out, ",{}", r.selected_count);
                } else {
                    out.push(',');
                }
                out.push('\n');
            }
        }
        out
    }

    pub fn to_markdown(&self) -> String {
        let m = &self.manifest;
        let mut s = String::new();
        let _ = writeln!(s, "# {} experiment\n", m.experiment);
        let _ = writeln!(
            s,
            "n = {}, train fraction = {}, seeds = {}, λ = {}, ε = {}\n",
            m.n,
            m.train_fraction,
            m.seeds.len(),
            match &m.lambda_grid {
                Some(g) => format!("selected from {} values", g.len()),
                None => format!("{}", m.lambda),
            },
            m.epsilon
        );
        if !self.catalog_diagnostics.is_empty() {
            s.push_str("## Catalog diagnostics\n\n");
            for d in &self.catalog_diagnostics {
                let _ = writeln!(s, "- {d}");
            }
            s.push('\n');
        }
        if !self.formulas.is_empty() {
            s.push_str("## PIFs\n\n| name | monomial |\n|---|---|\n");
            let mut names: Vec<&String> = self.formulas.keys().collect();
            names.sort_by_key(|n| (n.len(), n.to_string()));
            for n in names {
                let _ = writeln!(s, "| {n} | `{}` |", self.formulas[n]);
            }
            s.push('\n');
        }
        for noise in self.noise_levels() {
            let _ = writeln!(s, "## Noise {}%\n", pct(noise));
            s.push_str("| arm | median MAE | MAE IQR | median MSE | MSE IQR |\n|---|---|---|---|---|\n");
            for sm in self.summary.iter().filter(|x| x.noise == noise) {
                let _ = writeln!(
                    s,
                    "| {} | {} | [{}, {}] | {} | [{}, {}] |",
                    sm.arm,
                    g4(sm.mae.median),
                    g4(sm.mae.q1),
                    g4(sm.mae.q3),
                    g4(sm.mse.median),
                    g4(sm.mse.q1),
                    g4(sm.mse.q3)
                );
            }
            s.push('\n');
            if m.experiment.is_classification() {
                self.skill_table(&mut s, noise);
            }
            if let Some(sm) = self.summary_for(noise, Arm::Spif).filter(|x| !x.selected_count_histogram.is_empty()) {
                self.ranking_section(&mut s, sm);
            }
        }
        s
    }

    fn skill_table(&self, s: &mut String, noise: f64) {
        let arms: Vec<&ArmSummary> = self.summary.iter().filter(|x| x.noise == noise).collect();
        s.push_str("Confusion matrices pooled over seeds, `[[TP, FP], [FN, TN]]`:\n\n");
        for a in &arms {
            if let Some(cm) = a.pooled_confusion {
                let _ = writeln!(s, "- {}: `[[{}, {}], [{}, {}]]`", a.arm, cm.tp, cm.fp, cm.fn_, cm.tn);
            }
        }
        s.push_str("\nMedian skill scores over seeds:\n\n| score |");
        for a in &arms {
            let _ = write!(s, " {} |", a.arm);
        }
        s.push_str("\n|---|");
        for _ in &arms {
            s.push_str("---|");
        }
        s.push('\n');
        for name in SCORE_NAMES {
            let _ = write!(s, "| {name} |");
            for a in &arms {
                let v = a.scores.get(name).copied().flatten().map(|sp| sp.median);
                let _ = write!(s, " {} |", format_score(v));
            }
            s.push('\n');
        }
        s.push('\n');
    }

    fn ranking_section(&self, s: &mut String, sm: &ArmSummary) {
        s.push_str("Greedy ranking, seeds per selected count: ");
        let parts: Vec<String> = sm.selected_count_histogram.iter().map(|(k, v)| format!("{k} → {v}")).collect();
        s.push_str(&parts.join(", "));
        s.push_str("\n\n");
        let truth = ground_truth(self.manifest.experiment);
        s.push_str("Best ranked PIFs (selected in at least half of the seeds) and median de-standardized coefficients:\n\n");
        s.push_str("| PIF | monomial | selected | median β | IQR | ground truth |\n|---|---|---|---|---|---|\n");
        let mut names: Vec<&String> = sm.selection_frequency.keys().collect();
        names.sort_by_key(|n| (n.len(), n.to_string()));
        for name in names {
            let freq = sm.selection_frequency[name];
            if freq < 0.5 {
                continue;
            }
            let Some(sp) = sm.selected_coefficients.get(name) else { continue };
            let t = truth.iter().find(|(n, _)| n == name).map_or("0".to_string(), |(_, v)| g4(*v));
            let _ = writeln!(
                s,
                "| {name} | `{}` | {:.0}% | {} | [{}, {}] | {t} |",
                self.formulas.get(name).map_or("", String::as_str),
                freq * 100.0,
                g4(sp.median),
                g4(sp.q1),
                g4(sp.q3)
            );
        }
        s.push('\n');
    }

    /// `(file name, contents)` for one IQR box plot per metric and noise level.
    pub fn svgs(&self) -> Vec<(String, String)> {
        let classification = self.manifest.experiment.is_classification();
        let metrics: Vec<&str> = if classification { SCORE_NAMES.to_vec() } else { vec!["mae", "mse"] };
        let mut out = Vec::new();
        for noise in self.noise_levels() {
            for metric in &metrics {
                let groups: Vec<(String, Vec<f64>)> = arms(self.manifest.experiment)
                    .into_iter()
                    .map(|arm| {
                        let values = self
                            .trials
                            .iter()
                            .filter(|t| t.noise == noise)
                            .filter_map(|t| t.arm(arm))
                            .map(|r| match *metric {
                                "mae" => r.mae,
                                "mse" => r.mse,
                                name => r.scores.and_then(|s| s.get(name)).unwrap_or(f64::NAN),
                            })
                            .collect();
                        (arm.to_string(), values)
                    })
                    .collect();
                let title = format!("{} {} at {}% noise", self.manifest.experiment, metric.to_uppercase(), pct(noise));
                out.push((format!("{metric}_noise{}.svg", pct(noise)), box_plot(&title, &metric.to_uppercase(), &groups)));
            }
        }
        out
    }

    /// Writes `report.md`, `report.json`, `trials.csv` and, unless
    /// `csv_only`, the SVG box plots into `dir`.
    pub fn write(&self, dir: &Path, csv_only: bool) -> Result<Vec<PathBuf>> {
        fs::create_dir_all(dir)?;
        let mut files = vec![
            ("trials.csv".to_string(), self.trials_csv()),
            ("report.md".to_string(), self.to_markdown()),
            ("report.json".to_string(), self.to_json()?),
        ];
        if !csv_only {
            files.extend(self.svgs());
        }
        let mut written = Vec::new();
        for (name, body) in files {
            let path = dir.join(name);
            fs::write(&path, body)?;
            written.push(path);
        }
        Ok(written)
    }
}

/// A ridge model fitted on the leading `cut` rows, with both standardized parts.
pub struct SplitFit {
    pub model: RidgeModel,
    pub z_train: Array2<f64>,
    pub z_test: Array2<f64>,
}

/// Standardizes on the training rows and fits ridge. With a `(grid, validation_fraction)`
/// pair λ is chosen on the tail of the training rows, otherwise `lambda` is used.
/// Constant columns are dropped from the model and from both matrices.
pub fn fit_split(
    x: &Array2<f64>,
    names: &[String],
    y: ArrayView1<'_, f64>,
    cut: usize,
    lambda: f64,
    grid: Option<(&[f64], f64)>,
) -> Result<SplitFit> {
    if cut == 0 || cut > x.nrows() {
        return Err(Error::InvalidArgument(format!("split point {cut} outside 1..={}", x.nrows())));
    }
    let (z_train, params) = standardize_fit(x.slice(s![..cut, ..]))?;
    let z_test = params.apply(x.slice(s![cut.., ..]))?;
    let yt = y.slice(s![..cut]);
    let lambda = match grid {
        Some((grid, val_fraction)) => select_lambda(z_train.view(), yt, grid, val_fraction)?,
        None => lambda,
    };
    let mut model = ridge_fit(z_train.view(), yt, lambda)?;
    model.feature_names = params.retained.iter().map(|&j| names[j].clone()).collect();
    model.standardization = params;
    Ok(SplitFit { model, z_train, z_test })
}

/// Refits `model` on a subset of its standardized columns, keeping the
/// matching standardization so the result de-standardizes on its own.
pub fn refit_columns(model: &RidgeModel, z_train: ArrayView2<'_, f64>, y_train: ArrayView1<'_, f64>, cols: &[usize]) -> Result<RidgeModel> {
    let mut sub = ridge_fit(z_train.select(Axis(1), cols).view(), y_train, model.lambda)?;
    let s = &model.standardization;
    sub.standardization = StandardizationParams {
        means: cols.iter().map(|&c| s.means[c]).collect(),
        scales: cols.iter().map(|&c| s.scales[c]).collect(),
        retained: (0..cols.len()).collect(),
        input_columns: cols.len(),
    };
    sub.feature_names = cols.iter().map(|&c| model.feature_names[c].clone()).collect();
    Ok(sub)
}
