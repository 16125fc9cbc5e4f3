//! Seeded generators for the synthetic experiments and the noise injector.
//!
//! Randomness comes from ChaCha8 seeded with the dataset seed: stream 0
//! drives feature sampling, stream 1 drives label noise. Draws are taken
//! row-major in the listed feature order, and transcendental functions go
//! through `libm`, so a given `(n, seed, ranges)` yields the same bytes on
//! every platform.

use std::f64::consts::PI;
use std::fmt;
use std::str::FromStr;

use ndarray::{Array1, Array2, ArrayView1};
use rand_chacha::rand_core::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::dataset::{Dataset, FeatureSchema, Provenance};
use crate::error::{Error, Result};
use crate::featuremap::{GRAVITATIONAL_CONSTANT, SPEED_OF_LIGHT, STANDARD_GRAVITY, VACUUM_PERMEABILITY};

pub const DEFAULT_N: usize = 1000;

/// Pulsar labels are divided by `10^30` unless configured otherwise.
pub const DEFAULT_PULSAR_LABEL_SCALE: i32 = 30;

/// Multiplicative label noise `y·(1 + u)`, `u ~ U[−level, level]`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct NoiseConfig {
    pub level: f64,
    pub seed: u64,
}

impl NoiseConfig {
    pub fn new(level: f64, seed: u64) -> Result<Self> {
        if !(0.0..1.0).contains(&level) {
            return Err(Error::InvalidNoiseLevel(level));
        }
        Ok(NoiseConfig { level, seed })
    }
}

struct Stream(ChaCha8Rng);

impl Stream {
    fn new(seed: u64, stream: u64) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        rng.set_stream(stream);
        Stream(rng)
    }

    /// Uniform on [0, 1) with 53 random bits.
    fn unit(&mut self) -> f64 {
        (self.0.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
    }
}

pub fn add_noise(y: ArrayView1<'_, f64>, cfg: &NoiseConfig) -> Result<Array1<f64>> {
    let cfg = NoiseConfig::new(cfg.level, cfg.seed)?;
    let mut rng = Stream::new(cfg.seed, 1);
    Ok(y.mapv(|v| {
        let u = cfg.level * (2.0 * rng.unit() - 1.0);
        v * (1.0 + u)
    }))
}

/// Sampling interval; `log` draws uniformly in `ln x`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Interval {
    pub lo: f64,
    pub hi: f64,
    #[serde(default)]
    pub log: bool,
}

impl Interval {
    pub const fn uniform(lo: f64, hi: f64) -> Self {
        Interval { lo, hi, log: false }
    }

    pub const fn log_uniform(lo: f64, hi: f64) -> Self {
        Interval { lo, hi, log: true }
    }

    fn validate(&self, name: &str) -> Result<()> {
        let ok = self.lo.is_finite() && self.hi.is_finite() && self.lo <= self.hi && (!self.log || self.lo > 0.0);
        if ok {
            Ok(())
        } else {
            Err(Error::InvalidRange(format!("{name}: [{}, {}]{}", self.lo, self.hi, if self.log { " (log)" } else { "" })))
        }
    }

    fn sample(&self, rng: &mut Stream) -> f64 {
        let u = rng.unit();
        if self.log {
            let (a, b) = (libm::log(self.lo), libm::log(self.hi));
            libm::exp(a + (b - a) * u).clamp(self.lo, self.hi)
        } else {
            self.lo + (self.hi - self.lo) * u
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct BernoulliRanges {
    pub p: Interval,
    pub rho: Interval,
    pub v: Interval,
    pub q: Interval,
    pub a: Interval,
    pub mu: Interval,
    pub h: Interval,
}

impl Default for BernoulliRanges {
    fn default() -> Self {
        BernoulliRanges {
            p: Interval::uniform(5e4, 2e5),
            rho: Interval::uniform(1.0, 1.2e3),
            v: Interval::uniform(0.5, 20.0),
            q: Interval::uniform(1e-4, 1e-1),
            a: Interval::uniform(1e-4, 1e-1),
            mu: Interval::uniform(1e-5, 1e-1),
            h: Interval::uniform(0.1, 50.0),
        }
    }
}

impl BernoulliRanges {
    fn listed(&self) -> [(&'static str, Interval); 7] {
        [
            ("p", self.p),
            ("rho", self.rho),
            ("v", self.v),
            ("Q", self.q),
            ("A", self.a),
            ("mu", self.mu),
            ("h", self.h),
        ]
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct PulsarRanges {
    pub r: Interval,
    pub b: Interval,
    pub omega: Interval,
    pub alpha: Interval,
    pub m: Interval,
    /// Labels are divided by `10^label_scale_exponent`.
    pub label_scale_exponent: i32,
}

impl Default for PulsarRanges {
    fn default() -> Self {
        PulsarRanges {
            r: Interval::uniform(1e4, 2e4),
            b: Interval::log_uniform(1e4, 1e9),
            omega: Interval::uniform(0.1, 500.0),
            alpha: Interval::uniform(0.0, PI / 2.0),
            m: Interval::uniform(2e30, 4e30),
            label_scale_exponent: DEFAULT_PULSAR_LABEL_SCALE,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct BinaryRanges {
    pub m1: Interval,
    pub m2: Interval,
    pub v: Interval,
    pub r: Interval,
    /// Rows with `|E|` (J) below this are counted in the provenance notes; they are kept.
    #[serde(default)]
    pub dead_band: f64,
}

impl Default for BinaryRanges {
    fn default() -> Self {
        BinaryRanges {
            m1: Interval::log_uniform(1e29, 1e31),
            m2: Interval::log_uniform(1e29, 1e31),
            v: Interval::uniform(1e3, 1e5),
            r: Interval::log_uniform(1e9, 1e13),
            dead_band: 0.0,
        }
    }
}

/// `p + ρv²/2 + ρgh`.
pub fn bernoulli_label(p: f64, rho: f64, v: f64, h: f64) -> f64 {
    p + 0.5 * rho * v * v + rho * STANDARD_GRAVITY * h
}

/// Magnetic-dipole spin-down power `−2πB²r⁶ω⁴sin²α / (3μ₀c³)` in W.
pub fn pulsar_spin_down(r: f64, b: f64, omega: f64, alpha: f64) -> f64 {
    let s = libm::sin(alpha);
    -2.0 * PI * b * b * r.powi(6) * omega.powi(4) * s * s / (3.0 * VACUUM_PERMEABILITY * SPEED_OF_LIGHT.powi(3))
}

/// Bound energy `½μv² − Gm₁m₂/r` with reduced mass `μ = m₁m₂/(m₁+m₂)`.
pub fn binary_energy(m1: f64, m2: f64, v: f64, r: f64) -> f64 {
    let mu = m1 * m2 / (m1 + m2);
    0.5 * mu * v * v - GRAVITATIONAL_CONSTANT * m1 * m2 / r
}

fn check_n(n: usize) -> Result<()> {
    if n == 0 {
        return Err(Error::InvalidArgument("n must be at least 1".into()));
    }
    Ok(())
}

fn provenance<R: Serialize>(generator: &str, n: usize, seed: u64, ranges: &R) -> Provenance {
    Provenance {
        generator: generator.to_string(),
        n,
        seed,
        ranges: serde_json::to_value(ranges).expect("ranges serialize"),
        ..Provenance::default()
    }
}

pub fn gen_bernoulli(n: usize, seed: u64, ranges: &BernoulliRanges) -> Result<Dataset> {
    check_n(n)?;
    let listed = ranges.listed();
    for (name, iv) in &listed {
        iv.validate(name)?;
    }
    let mut rng = Stream::new(seed, 0);
    let mut x = Array2::zeros((n, listed.len()));
    let mut y = Array1::zeros(n);
    for i in 0..n {
        for (j, (_, iv)) in listed.iter().enumerate() {
            x[[i, j]] = iv.sample(&mut rng);
        }
        y[i] = bernoulli_label(x[[i, 0]], x[[i, 1]], x[[i, 2]], x[[i, 6]]);
    }
    let schema = FeatureSchema::from_units(&[
        ("p", "Pa"),
        ("rho", "kg/m^3"),
        ("v", "m/s"),
        ("Q", "m^3/s"),
        ("A", "m^2"),
        ("mu", "kg/(m*s)"),
        ("h", "m"),
    ])?;
    Ok(Dataset::new(schema, x, y, "Pa")?.with_provenance(provenance("bernoulli", n, seed, ranges)))
}

pub fn gen_pulsar(n: usize, seed: u64, ranges: &PulsarRanges) -> Result<Dataset> {
    check_n(n)?;
    let sampled = [
        ("r", ranges.r),
        ("B", ranges.b),
        ("omega", ranges.omega),
        ("alpha", ranges.alpha),
        ("m", ranges.m),
    ];
    for (name, iv) in &sampled {
        iv.validate(name)?;
    }
    if ranges.omega.lo <= 0.0 {
        return Err(Error::InvalidRange("omega must be positive".into()));
    }
    let scale = libm::pow(10.0, f64::from(ranges.label_scale_exponent));
    let mut rng = Stream::new(seed, 0);
    let mut x = Array2::zeros((n, 8));
    let mut y = Array1::zeros(n);
    for i in 0..n {
        let [r, b, omega, alpha, m] = sampled.map(|(_, iv)| iv.sample(&mut rng));
        let inertia = 2.0 * m * r * r / 5.0;
        let row = [r, b, omega, alpha, 2.0 * PI / omega, m, inertia, inertia * omega * omega / 2.0];
        x.row_mut(i).assign(&ndarray::ArrayView1::from(&row));
        y[i] = pulsar_spin_down(r, b, omega, alpha) / scale;
    }
    let schema = FeatureSchema::from_units(&[
        ("r", "m"),
        ("B", "T"),
        ("omega", "1/s"),
        ("alpha", "rad"),
        ("P", "s"),
        ("m", "kg"),
        ("I", "kg*m^2"),
        ("E", "J"),
    ])?;
    let mut prov = provenance("pulsar", n, seed, ranges);
    prov.label_scale_exponent = ranges.label_scale_exponent;
    Ok(Dataset::new(schema, x, y, "W")?.with_provenance(prov))
}

/// Labels are 1 for bound systems (`E < 0`) and 0 otherwise.
pub fn gen_binary(n: usize, seed: u64, ranges: &BinaryRanges) -> Result<Dataset> {
    check_n(n)?;
    let sampled = [("m1", ranges.m1), ("m2", ranges.m2), ("v", ranges.v), ("r", ranges.r)];
    for (name, iv) in &sampled {
        iv.validate(name)?;
    }
    if ranges.dead_band.is_nan() || ranges.dead_band < 0.0 {
        return Err(Error::InvalidRange(format!("dead_band must be >= 0, got {}", ranges.dead_band)));
    }
    if ranges.m1.lo <= 0.0 || ranges.m2.lo <= 0.0 || ranges.r.lo <= 0.0 {
        return Err(Error::InvalidRange("masses and separation must be positive".into()));
    }
    let mut rng = Stream::new(seed, 0);
    let mut x = Array2::zeros((n, 4));
    let mut y = Array1::zeros(n);
    let mut near_boundary = 0usize;
    for i in 0..n {
        let row = sampled.map(|(_, iv)| iv.sample(&mut rng));
        let e = binary_energy(row[0], row[1], row[2], row[3]);
        if e.abs() < ranges.dead_band {
            near_boundary += 1;
        }
        y[i] = if e < 0.0 { 1.0 } else { 0.0 };
        x.row_mut(i).assign(&ndarray::ArrayView1::from(&row));
    }
    let schema = FeatureSchema::from_units(&[("m1", "kg"), ("m2", "kg"), ("v", "m/s"), ("r", "m")])?;
    let mut prov = provenance("binary", n, seed, ranges);
    if ranges.dead_band > 0.0 {
        prov.notes.push(format!("{near_boundary} rows have |E| below the dead band and were kept"));
    }
    let positives = y.iter().filter(|&&v| v == 1.0).count();
    if positives == 0 || positives == n {
        log::warn!("binary dataset (seed {seed}) has a single class");
        prov.notes.push("degenerate class balance: one class absent".into());
    }
    Ok(Dataset::new(schema, x, y, "1")?.with_provenance(prov))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Generator {
    Bernoulli,
    Pulsar,
    Binary,
}

impl Generator {
    pub const ALL: [Generator; 3] = [Generator::Bernoulli, Generator::Pulsar, Generator::Binary];

    pub fn name(self) -> &'static str {
        match self {
            Generator::Bernoulli => "bernoulli",
            Generator::Pulsar => "pulsar",
            Generator::Binary => "binary",
        }
    }

    /// Classification datasets carry sign labels and are never noised.
    pub fn is_classification(self) -> bool {
        self == Generator::Binary
    }

    /// Generates with default ranges, then applies `noise` to regression labels.
    pub fn generate(self, n: usize, seed: u64, noise: f64) -> Result<Dataset> {
        let cfg = NoiseConfig::new(noise, seed)?;
        let mut data = match self {
            Generator::Bernoulli => gen_bernoulli(n, seed, &BernoulliRanges::default())?,
            Generator::Pulsar => gen_pulsar(n, seed, &PulsarRanges::default())?,
            Generator::Binary => gen_binary(n, seed, &BinaryRanges::default())?,
        };
        let prov = data.provenance.as_mut().expect("generators set provenance");
        if self.is_classification() {
            if noise > 0.0 {
                log::warn!("noise is not applied to class labels");
                prov.notes.push(format!("requested noise {noise} not applied to class labels"));
            }
        } else {
            data.y = add_noise(data.y.view(), &cfg)?;
            prov.noise = Some(cfg);
        }
        Ok(data)
    }
}

impl fmt::Display for Generator {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Generator {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Generator::ALL
            .into_iter()
            .find(|g| g.name() == s)
            .ok_or_else(|| Error::InvalidArgument(format!("unknown generator `{s}` (bernoulli, pulsar, binary)")))
    }
}
