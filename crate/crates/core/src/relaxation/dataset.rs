use std::io::Read;
use std::path::Path;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};
use serde::Serialize;

use super::{model_lifetime, RelaxationModel};
use crate::error::{Error, Result};
use crate::format::fmt_f64;

/// Column names of the dataset CSV format.
pub const CSV_HEADER: &str = "T_K,tau_s,sigma_ln_tau,mode";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum MeasurementMode {
    #[serde(rename = "DC")]
    Dc,
    #[serde(rename = "AC")]
    Ac,
}

impl MeasurementMode {
    pub fn as_str(self) -> &'static str {
        match self {
            MeasurementMode::Dc => "DC",
            MeasurementMode::Ac => "AC",
        }
    }
}

impl std::str::FromStr for MeasurementMode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_uppercase().as_str() {
            "DC" => Ok(MeasurementMode::Dc),
            "AC" => Ok(MeasurementMode::Ac),
            other => Err(Error::Dataset(format!("unknown measurement mode `{other}`"))),
        }
    }
}

/// One lifetime observation.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct DataPoint {
    /// Kelvin.
    pub temperature: f64,
    /// Seconds.
    pub tau: f64,
    /// Uncertainty of ln τ, if known.
    pub sigma_ln_tau: Option<f64>,
    /// Metadata only; does not affect weighting.
    pub mode: Option<MeasurementMode>,
}

impl DataPoint {
    pub fn new(temperature: f64, tau: f64) -> Self {
        Self { temperature, tau, sigma_ln_tau: None, mode: None }
    }
}

/// Lifetime observations plus a free-form source label.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RelaxationDataset {
    points: Vec<DataPoint>,
    source: String,
}

impl RelaxationDataset {
    pub fn new(points: Vec<DataPoint>, source: impl Into<String>) -> Result<Self> {
        for (i, p) in points.iter().enumerate() {
            if !(p.temperature.is_finite() && p.temperature > 0.0) {
                return Err(Error::Dataset(format!("point {i}: temperature must be > 0, got {}", p.temperature)));
            }
            if !(p.tau.is_finite() && p.tau > 0.0) {
                return Err(Error::Dataset(format!("point {i}: tau must be > 0, got {}", p.tau)));
            }
            if let Some(s) = p.sigma_ln_tau {
                if !(s.is_finite() && s > 0.0) {
                    return Err(Error::Dataset(format!("point {i}: sigma_ln_tau must be > 0, got {s}")));
                }
            }
        }
        Ok(Self { points, source: source.into() })
    }

    pub fn points(&self) -> &[DataPoint] {
        &self.points
    }

    pub fn source(&self) -> &str {
        &self.source
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn temperatures(&self) -> Vec<f64> {
        self.points.iter().map(|p| p.temperature).collect()
    }

    /// Parse the `T_K,tau_s[,sigma_ln_tau][,mode]` CSV format. Columns are
    /// located by header name; empty optional cells mean "absent".
    pub fn from_csv_reader<R: Read>(reader: R, source: impl Into<String>) -> Result<Self> {
        let mut rdr = csv::ReaderBuilder::new().trim(csv::Trim::All).from_reader(reader);
        let headers = rdr.headers().map_err(|e| Error::Dataset(e.to_string()))?.clone();
        let col = |name: &str| headers.iter().position(|h| h == name);
        let t_col = col("T_K").ok_or_else(|| Error::Dataset("missing column `T_K`".into()))?;
        let tau_col = col("tau_s").ok_or_else(|| Error::Dataset("missing column `tau_s`".into()))?;
        let sigma_col = col("sigma_ln_tau");
        let mode_col = col("mode");

        let number = |rec: &csv::StringRecord, c: usize, line: usize| -> Result<f64> {
            let s = rec.get(c).unwrap_or("");
            s.parse::<f64>().map_err(|_| Error::Dataset(format!("line {line}: cannot parse `{s}` as a number")))
        };

        let mut points = Vec::new();
        for (i, rec) in rdr.records().enumerate() {
            let rec = rec.map_err(|e| Error::Dataset(e.to_string()))?;
            let line = i + 2;
            let mut p = DataPoint::new(number(&rec, t_col, line)?, number(&rec, tau_col, line)?);
            if let Some(c) = sigma_col {
                if !rec.get(c).unwrap_or("").is_empty() {
                    p.sigma_ln_tau = Some(number(&rec, c, line)?);
                }
            }
            if let Some(c) = mode_col {
                let s = rec.get(c).unwrap_or("");
                if !s.is_empty() {
                    p.mode = Some(s.parse()?);
                }
            }
            points.push(p);
        }
        Self::new(points, source)
    }

    pub fn from_csv_path(path: &Path) -> Result<Self> {
        let file = std::fs::File::open(path).map_err(|e| Error::Dataset(format!("{}: {e}", path.display())))?;
        Self::from_csv_reader(file, path.display().to_string())
    }

    /// Full four-column CSV; absent optional values are empty cells.
    pub fn to_csv(&self) -> String {
        let mut out = String::from(CSV_HEADER);
        out.push('\n');
        for p in &self.points {
            out.push_str(&fmt_f64(p.temperature));
            out.push(',');
            out.push_str(&fmt_f64(p.tau));
            out.push(',');
            if let Some(s) = p.sigma_ln_tau {
                out.push_str(&fmt_f64(s));
            }
            out.push(',');
            if let Some(m) = p.mode {
                out.push_str(m.as_str());
            }
            out.push('\n');
        }
        out
    }
}

/// `n` logarithmically spaced values from `lo` to `hi` inclusive.
pub fn log_spaced(lo: f64, hi: f64, n: usize) -> Result<Vec<f64>> {
    if !(lo > 0.0 && hi > lo && hi.is_finite()) || n < 2 {
        return Err(Error::InvalidRange(format!("log grid needs 0 < lo < hi and n >= 2, got [{lo}, {hi}], n = {n}")));
    }
    let (a, b) = (lo.ln(), hi.ln());
    let step = (b - a) / (n - 1) as f64;
    Ok((0..n)
        .map(|i| match i {
            0 => lo,
            _ if i == n - 1 => hi,
            _ => (a + step * i as f64).exp(),
        })
        .collect())
}

/// Lifetimes on `temperatures` with multiplicative log-normal noise.
///
/// `τ_k = τ(T_k) · exp(ε_k)`, `ε_k ~ N(0, noise_sigma²)`, drawn from a
/// ChaCha8 stream seeded with `seed`. The same seed always gives the same
/// dataset.
pub fn synthesize(
    model: &RelaxationModel,
    temperatures: &[f64],
    noise_sigma: f64,
    seed: u64,
) -> Result<RelaxationDataset> {
    if temperatures.is_empty() {
        return Err(Error::InsufficientData { have: 0, need: 1 });
    }
    if !(noise_sigma.is_finite() && noise_sigma >= 0.0) {
        return Err(Error::invalid("noise_sigma", format!("must be >= 0, got {noise_sigma}")));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let normal = Normal::new(0.0, noise_sigma).expect("sigma checked above");
    let points = temperatures
        .iter()
        .map(|&t| {
            let tau = model_lifetime(model, t)?;
            let eps = if noise_sigma > 0.0 { normal.sample(&mut rng) } else { 0.0 };
            Ok(DataPoint::new(t, tau * eps.exp()))
        })
        .collect::<Result<Vec<_>>>()?;
    RelaxationDataset::new(points, format!("synthetic (seed {seed}, sigma {noise_sigma})"))
}
