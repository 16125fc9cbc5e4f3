//! `pifml`: generate datasets, enumerate and check feature maps, fit, rank,
//! evaluate, and reproduce the SF-vs-SPIF experiments.
//!
//! Exit codes: 0 success, 2 usage, 3 I/O or malformed files, 4 budget
//! exceeded, 5 numerical failure.

use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{ArgGroup, Args, Parser, Subcommand};
use pifml::dimension::Dimension;
use pifml::experiment::{fit_split, refit_columns, run_experiment, ExperimentManifest, SplitFit};
use pifml::featuremap::{
    catalog_names, destandardize, enumerate_monomials, evaluate_map, load_catalog, EnumerationBounds,
    DEFAULT_CANDIDATE_CAP,
};
use pifml::metrics::{confusion, mae, mse, skill_report};
use pifml::ranking::{greedy_select, rank_by_coefficient, DEFAULT_EPSILON};
use pifml::regression::{classify, default_lambda_grid, DEFAULT_LAMBDA};
use pifml::synthdata::{Generator, DEFAULT_N};
use pifml::{Dataset, Error, Execution, FeatureMapSpec, FeatureSchema, PhysicalConstant, Result, RidgeModel};
use serde_json::{json, Value};

#[derive(Parser)]
#[command(name = "pifml", version, about = "Physics-informed feature maps and ridge regression")]
struct Cli {
    /// Run every loop on one thread.
    #[arg(long, global = true)]
    sequential: bool,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Generate a synthetic dataset (CSV plus JSON manifest).
    Synth {
        generator: Generator,
        #[arg(long, default_value_t = DEFAULT_N)]
        n: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Multiplicative uniform noise level in [0, 1).
        #[arg(long, default_value_t = 0.0)]
        noise: f64,
        /// Output CSV; the manifest is written next to it.
        #[arg(long, short)]
        out: Option<PathBuf>,
    },
    /// Enumerate dimensionally homogeneous monomials of a schema.
    Enumerate {
        /// Schema file: JSON array of {name, unit} or a CSV whose header has `name[unit]` cells.
        schema: PathBuf,
        /// Target unit, e.g. `Pa` or `W`.
        #[arg(long)]
        target: String,
        #[arg(long, default_value_t = 2)]
        max_exponent: i32,
        #[arg(long, default_value_t = 3)]
        max_active: usize,
        /// Built-in constants to include: g, G, mu0, c.
        #[arg(long = "constant")]
        constants: Vec<String>,
        #[arg(long, default_value_t = 1)]
        max_constant_exponent: i32,
        /// Abort with exit code 4 once this many candidates are found.
        #[arg(long, env = "PIFML_BUDGET_CAP", default_value_t = DEFAULT_CANDIDATE_CAP)]
        cap: usize,
        #[arg(long, default_value = "enumerated")]
        name: String,
        #[arg(long, short)]
        out: Option<PathBuf>,
    },
    /// Fit ridge regression on the training split and report test metrics.
    Fit {
        #[command(flatten)]
        input: Input,
        #[command(flatten)]
        lambda: LambdaArgs,
        /// Where to write the model JSON.
        #[arg(long, short)]
        out: Option<PathBuf>,
    },
    /// Greedy coefficient-ordered ranking with error saturation.
    Rank {
        #[command(flatten)]
        input: Input,
        #[command(flatten)]
        lambda: LambdaArgs,
        #[arg(long, default_value_t = DEFAULT_EPSILON)]
        epsilon: f64,
        /// Directory for ranking.json and curve.csv.
        #[arg(long, short)]
        out: Option<PathBuf>,
    },
    /// Evaluate a saved model on every row of a dataset.
    Eval {
        #[arg(long)]
        model: PathBuf,
        #[arg(long)]
        data: PathBuf,
        #[command(flatten)]
        features: Features,
        /// Threshold the scores into 0/1 classes and report skill scores.
        #[arg(long, num_args = 0..=1, default_missing_value = "0.5")]
        classify: Option<f64>,
    },
    /// Run the full SF-vs-SPIF comparison and write a report.
    Reproduce {
        experiment: Generator,
        /// Number of seeds (1..=N) or a comma-separated list.
        #[arg(long, default_value = "20")]
        seeds: String,
        #[arg(long)]
        n: Option<usize>,
        /// Comma-separated noise levels; defaults to 0.1,0.3,0.5 (0 for binary).
        #[arg(long, value_delimiter = ',')]
        noise: Option<Vec<f64>>,
        #[arg(long)]
        lambda: Option<f64>,
        /// Choose λ per fit from the grid on a validation tail.
        #[arg(long)]
        select: bool,
        #[arg(long, env = "PIFML_LAMBDA_GRID", value_delimiter = ',')]
        lambda_grid: Option<Vec<f64>>,
        #[arg(long)]
        epsilon: Option<f64>,
        #[arg(long, short, default_value = "report")]
        out: PathBuf,
        /// Skip the SVG box plots.
        #[arg(long)]
        csv_only: bool,
    },
    /// List curated catalogs or print one as a spec document.
    Catalog {
        name: Option<String>,
        /// Load a catalog even if some entries fail the dimension check.
        #[arg(long)]
        allow_inconsistent: bool,
    },
}

#[derive(Args)]
struct Input {
    /// Dataset CSV.
    #[arg(long)]
    data: PathBuf,
    #[command(flatten)]
    features: Features,
    /// Fraction of leading rows used for training.
    #[arg(long, default_value_t = 0.7)]
    split: f64,
}

#[derive(Args)]
#[group(skip)]
#[command(group(ArgGroup::new("source").required(true).args(["spec", "raw"])))]
struct Features {
    /// Catalog name or spec JSON file.
    #[arg(long)]
    spec: Option<String>,
    /// Use the raw standardized features.
    #[arg(long)]
    raw: bool,
    /// Accept a spec with dimensionally inconsistent monomials.
    #[arg(long, requires = "spec")]
    allow_inconsistent: bool,
}

#[derive(Args)]
struct LambdaArgs {
    #[arg(long, default_value_t = DEFAULT_LAMBDA, conflicts_with = "select")]
    lambda: f64,
    /// Choose λ from the grid on the last part of the training rows.
    #[arg(long)]
    select: bool,
    #[arg(long, env = "PIFML_LAMBDA_GRID", value_delimiter = ',')]
    lambda_grid: Option<Vec<f64>>,
    #[arg(long, default_value_t = 0.2)]
    validation_fraction: f64,
}

impl LambdaArgs {
    fn grid(&self) -> Option<(Vec<f64>, f64)> {
        self.select
            .then(|| (self.lambda_grid.clone().unwrap_or_else(default_lambda_grid), self.validation_fraction))
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();
    let exec = if cli.sequential { Execution::Sequential } else { Execution::default() };
    match run(cli.command, exec) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}

fn run(command: Command, exec: Execution) -> Result<()> {
    match command {
        Command::Synth { generator, n, seed, noise, out } => {
            let data = generator.generate(n, seed, noise)?;
            let out = out.unwrap_or_else(|| PathBuf::from(format!("{generator}.csv")));
            data.save(&out)?;
            println!("wrote {} rows to {}", data.len(), out.display());
            Ok(())
        }
        Command::Enumerate {
            schema,
            target,
            max_exponent,
            max_active,
            constants,
            max_constant_exponent,
            cap,
            name,
            out,
        } => {
            let schema = read_schema(&schema)?;
            let constants = constants
                .iter()
                .map(|c| PhysicalConstant::builtin(c).ok_or_else(|| Error::InvalidArgument(format!("unknown constant `{c}`"))))
                .collect::<Result<Vec<_>>>()?;
            let bounds = EnumerationBounds::new(max_exponent, max_active)
                .with_constant_exponent(max_constant_exponent)
                .with_cap(cap);
            let monomials = enumerate_monomials(&schema.dimensions(), &constants, Dimension::parse(&target)?, bounds)?;
            if monomials.is_empty() {
                log::warn!("no monomial of the schema has dimension `{target}` within the bounds");
            }
            let spec = FeatureMapSpec::new(&name, &target, schema, constants, monomials)?;
            emit(out.as_deref(), &spec.to_json()?)
        }
        Command::Fit { input, lambda, out } => {
            let (data, spec, x, names) = load_input(&input.data, &input.features)?;
            let cut = Dataset::split_point(data.len(), input.split)?;
            let grid = lambda.grid();
            let fit = fit_split(&x, &names, data.y.view(), cut, lambda.lambda, grid.as_ref().map(|(g, v)| (g.as_slice(), *v)))?;
            let pred = fit.model.predict(fit.z_test.view())?;
            let yv = data.y.slice(ndarray::s![cut..]);
            let mut report = json!({
                "lambda": fit.model.lambda,
                "train_rows": cut,
                "test_rows": data.len() - cut,
                "test_mae": mae(yv, pred.view())?,
                "test_mse": mse(yv, pred.view())?,
                "equation": equation(&fit.model, spec.as_ref())?,
            });
            if let Some(out) = out {
                fs::write(&out, fit.model.to_json()?)?;
                report["model"] = json!(out.display().to_string());
            }
            print_json(&report)
        }
        Command::Rank { input, lambda, epsilon, out } => {
            let (data, spec, x, names) = load_input(&input.data, &input.features)?;
            let cut = Dataset::split_point(data.len(), input.split)?;
            let grid = lambda.grid();
            let SplitFit { model, z_train, z_test } =
                fit_split(&x, &names, data.y.view(), cut, lambda.lambda, grid.as_ref().map(|(g, v)| (g.as_slice(), *v)))?;
            let (yt, yv) = (data.y.slice(ndarray::s![..cut]), data.y.slice(ndarray::s![cut..]));
            let order = rank_by_coefficient(&model);
            let ranking = greedy_select(z_train.view(), yt, z_test.view(), yv, model.lambda, &order, epsilon)?;
            let selected = refit_columns(&model, z_train.view(), yt, ranking.selected())?;
            let ranked: Vec<&str> = order.iter().map(|&j| model.feature_names[j].as_str()).collect();
            let report = json!({
                "ranking": serde_json::to_value(&ranking)?,
                "ranked_features": ranked,
                "selected_features": selected.feature_names,
                "selected_equation": equation(&selected, spec.as_ref())?,
            });
            if let Some(dir) = out {
                fs::create_dir_all(&dir)?;
                fs::write(dir.join("ranking.json"), pretty(&report)?)?;
                fs::write(dir.join("curve.csv"), ranking.curve_csv())?;
            }
            print_json(&report)
        }
        Command::Eval { model, data, features, classify: threshold } => {
            let text = fs::read_to_string(&model).map_err(|e| with_path(e.into(), &model))?;
            let model = RidgeModel::from_json(&text)?;
            let (data, _, x, names) = load_input(&data, &features)?;
            if model.standardization.input_columns != names.len() {
                return Err(Error::ColumnMismatch {
                    expected: model.standardization.input_columns,
                    found: names.len(),
                });
            }
            let expected = model.standardization.retained.iter().map(|&j| &names[j]);
            if let Some((want, have)) = model.feature_names.iter().zip(expected).find(|(a, b)| a != b) {
                return Err(Error::SchemaMismatch(format!("model expects column `{want}`, data provides `{have}`")));
            }
            let scores = model.predict_raw(x.view())?;
            let mut report = json!({
                "rows": data.len(),
                "mae": mae(data.y.view(), scores.view())?,
                "mse": mse(data.y.view(), scores.view())?,
            });
            if let Some(t) = threshold.or(model.threshold) {
                let labels = classify(scores.as_slice().expect("contiguous"), t);
                let cm = confusion(data.y.as_slice().expect("contiguous"), &labels)?;
                report["threshold"] = json!(t);
                report["skill"] = skill_report(&cm);
            }
            print_json(&report)
        }
        Command::Reproduce {
            experiment,
            seeds,
            n,
            noise,
            lambda,
            select,
            lambda_grid,
            epsilon,
            out,
            csv_only,
        } => {
            let mut m = ExperimentManifest::new(experiment);
            m.seeds = parse_seeds(&seeds)?;
            if let Some(n) = n {
                m.n = n;
            }
            if let Some(noise) = noise {
                m.noise_levels = noise;
            }
            if let Some(l) = lambda {
                m.lambda = l;
            }
            if select {
                m.lambda_grid = Some(lambda_grid.unwrap_or_else(default_lambda_grid));
            }
            if let Some(e) = epsilon {
                m.epsilon = e;
            }
            m.output = Some(out.clone());
            let report = run_experiment(&m, exec)?;
            fs::create_dir_all(&out)?;
            for path in report.write(&out, csv_only)? {
                println!("wrote {}", path.display());
            }
            Ok(())
        }
        Command::Catalog { name: None, .. } => {
            for name in catalog_names() {
                println!("{name}");
            }
            Ok(())
        }
        Command::Catalog {
            name: Some(name),
            allow_inconsistent,
        } => {
            emit(None, &load_catalog(&name, allow_inconsistent)?.to_json()?)
        }
    }
}

type Design = (Dataset, Option<FeatureMapSpec>, ndarray::Array2<f64>, Vec<String>);

/// Loads a dataset and builds its design matrix from a spec or the raw features.
fn load_input(path: &Path, features: &Features) -> Result<Design> {
    let data = Dataset::load(path).map_err(|e| with_path(e, path))?;
    match &features.spec {
        Some(source) => {
            let spec = load_spec(source, features.allow_inconsistent)?;
            let x = evaluate_map(&spec, &data)?;
            let names = spec.column_names();
            Ok((data, Some(spec), x, names))
        }
        None => {
            let (x, names) = (data.x.clone(), data.schema.names());
            Ok((data, None, x, names))
        }
    }
}

fn load_spec(source: &str, allow_inconsistent: bool) -> Result<FeatureMapSpec> {
    if catalog_names().contains(&source) {
        return load_catalog(source, allow_inconsistent);
    }
    let text = fs::read_to_string(source).map_err(|e| with_path(e.into(), Path::new(source)))?;
    FeatureMapSpec::from_json(&text, allow_inconsistent)
}

fn read_schema(path: &Path) -> Result<FeatureSchema> {
    let text = fs::read_to_string(path).map_err(|e| with_path(e.into(), path))?;
    if text.trim_start().starts_with('[') {
        FeatureSchema::from_json(&text)
    } else {
        FeatureSchema::from_csv_header(text.lines().next().unwrap_or(""))
    }
}

/// De-standardized coefficients, with monomial formulas when a spec is known.
fn equation(model: &RidgeModel, spec: Option<&FeatureMapSpec>) -> Result<Value> {
    match spec {
        Some(spec) => {
            let eq = destandardize(model, spec)?;
            Ok(serde_json::to_value(eq)?)
        }
        None => {
            let (beta, intercept) = model.destandardized()?;
            let terms: Vec<Value> = model
                .feature_names
                .iter()
                .zip(beta)
                .map(|(name, coefficient)| json!({"name": name, "coefficient": coefficient}))
                .collect();
            Ok(json!({"terms": terms, "intercept": intercept}))
        }
    }
}

/// Names the file in I/O errors; other errors pass through.
fn with_path(e: Error, path: &Path) -> Error {
    match e {
        Error::Io(io) => Error::Io(std::io::Error::new(io.kind(), format!("{}: {io}", path.display()))),
        other => other,
    }
}

fn parse_seeds(text: &str) -> Result<Vec<u64>> {
    let bad = || Error::InvalidArgument(format!("seeds must be a count or a comma-separated list, got `{text}`"));
    if text.contains(',') {
        return text.split(',').map(|s| s.trim().parse().map_err(|_| bad())).collect();
    }
    let count: u64 = text.trim().parse().map_err(|_| bad())?;
    Ok((1..=count).collect())
}

fn pretty(value: &Value) -> Result<String> {
    let mut s = serde_json::to_string_pretty(value)?;
    s.push('\n');
    Ok(s)
}

fn print_json(value: &Value) -> Result<()> {
    print!("{}", pretty(value)?);
    Ok(())
}

fn emit(out: Option<&Path>, text: &str) -> Result<()> {
    match out {
        Some(path) => Ok(fs::write(path, text)?),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}
