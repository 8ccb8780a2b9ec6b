//! Multi-channel Arrhenius model of zero-field magnetization lifetimes.
//!
//! Channels act in parallel, so rates add:
//!
//! ```text
//! 1/τ(T) = Σ_i exp(−Δ_i/T) / τ0_i
//! ```
//!
//! with barriers Δ_i in kelvin (Δ_eff/k_B) and prefactors τ0_i in seconds.

mod dataset;
mod fit;

use serde::Serialize;

use crate::error::{Error, Result};

pub use dataset::{log_spaced, synthesize, DataPoint, MeasurementMode, RelaxationDataset};
pub use fit::{fit, FitResult, ProcessErrors, CONFOUNDED_CORRELATION, FIT_MAX_ITERATIONS, RESOLVED_SIGNIFICANCE};

/// Most channels a [`RelaxationModel`] may hold.
pub const MAX_PROCESSES: usize = 4;

/// One activated decay channel `τ0 · exp(Δ/T)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ArrheniusProcess {
    tau0: f64,
    delta: f64,
}

impl ArrheniusProcess {
    pub fn new(tau0: f64, delta: f64) -> Result<Self> {
        if !(tau0.is_finite() && tau0 > 0.0) {
            return Err(Error::invalid("tau0", format!("must be finite and > 0, got {tau0}")));
        }
        if !(delta.is_finite() && delta >= 0.0) {
            return Err(Error::invalid("delta", format!("must be finite and >= 0, got {delta}")));
        }
        Ok(Self { tau0, delta })
    }

    /// Prefactor in seconds.
    pub fn tau0(&self) -> f64 {
        self.tau0
    }

    /// Barrier Δ/k_B in kelvin.
    pub fn delta(&self) -> f64 {
        self.delta
    }

    /// ln of the decay rate (1/s) at `t` kelvin.
    pub fn ln_rate(&self, t: f64) -> f64 {
        -self.tau0.ln() - self.delta / t
    }

    pub fn lifetime(&self, t: f64) -> f64 {
        self.tau0 * (self.delta / t).exp()
    }
}

/// Parallel combination of 1 to [`MAX_PROCESSES`] channels, sorted by barrier.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RelaxationModel {
    processes: Vec<ArrheniusProcess>,
}

impl RelaxationModel {
    pub fn new(mut processes: Vec<ArrheniusProcess>) -> Result<Self> {
        if processes.is_empty() || processes.len() > MAX_PROCESSES {
            return Err(Error::invalid(
                "processes",
                format!("need 1..={MAX_PROCESSES} channels, got {}", processes.len()),
            ));
        }
        processes.sort_by(|a, b| a.delta.total_cmp(&b.delta));
        Ok(Self { processes })
    }

    pub fn single(tau0: f64, delta: f64) -> Result<Self> {
        Self::new(vec![ArrheniusProcess::new(tau0, delta)?])
    }

    pub fn processes(&self) -> &[ArrheniusProcess] {
        &self.processes
    }

    pub fn len(&self) -> usize {
        self.processes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.processes.is_empty()
    }

    /// ln τ(T), evaluated with a log-sum-exp over channel rates.
    pub fn ln_lifetime(&self, t: f64) -> f64 {
        -log_sum_exp(self.processes.iter().map(|p| p.ln_rate(t)))
    }

    /// Fraction of the total rate carried by each channel at `t` kelvin.
    pub fn rate_fractions(&self, t: f64) -> Vec<f64> {
        let z: Vec<f64> = self.processes.iter().map(|p| p.ln_rate(t)).collect();
        let lse = log_sum_exp(z.iter().copied());
        z.iter().map(|zi| (zi - lse).exp()).collect()
    }
}

pub(crate) fn log_sum_exp(z: impl Iterator<Item = f64> + Clone) -> f64 {
    let m = z.clone().fold(f64::NEG_INFINITY, f64::max);
    if !m.is_finite() {
        return m;
    }
    m + z.map(|x| (x - m).exp()).sum::<f64>().ln()
}

/// Lifetime τ(T) in seconds of the parallel-channel model.
pub fn model_lifetime(model: &RelaxationModel, t: f64) -> Result<f64> {
    if !(t.is_finite() && t > 0.0) {
        return Err(Error::invalid("T", format!("temperature must be finite and > 0, got {t}")));
    }
    Ok(model.ln_lifetime(t).exp())
}
