//! Spectrum sweeps and scalar extraction of tunneling parameters.

use serde::Serialize;

use crate::constants::PhysicalConstants;
use crate::error::{Error, Result};
use crate::format::fmt_f64;
use crate::model::{
    build_hamiltonian, closed_form_zero_field, eigensystem, moment_expectation, FieldVector, ModelParams, MomentVector,
};
use crate::reference::MOLECULES;

/// Eigenvalues (and optionally ground-state moments) along one scan axis.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SweepTable {
    pub axis_name: String,
    pub axis_values: Vec<f64>,
    pub eigenvalue_rows: Vec<[f64; 4]>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub ground_moment_rows: Option<Vec<MomentVector>>,
}

impl SweepTable {
    pub fn len(&self) -> usize {
        self.axis_values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.axis_values.is_empty()
    }

    /// `axis,lambda1,lambda2,lambda3,lambda4[,mx,my]`, one row per axis value.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("axis,lambda1,lambda2,lambda3,lambda4");
        if self.ground_moment_rows.is_some() {
            out.push_str(",mx,my");
        }
        out.push('\n');
        for (i, (x, row)) in self.axis_values.iter().zip(&self.eigenvalue_rows).enumerate() {
            out.push_str(&fmt_f64(*x));
            for v in row {
                out.push(',');
                out.push_str(&fmt_f64(*v));
            }
            if let Some(m) = &self.ground_moment_rows {
                out.push(',');
                out.push_str(&fmt_f64(m[i].mx));
                out.push(',');
                out.push_str(&fmt_f64(m[i].my));
            }
            out.push('\n');
        }
        out
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("sweep table serializes")
    }
}

/// `n` evenly spaced points from `lo` to `hi`, both endpoints exact.
fn linspace(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    let step = (hi - lo) / (n - 1) as f64;
    (0..n).map(|i| if i == n - 1 { hi } else { lo + step * i as f64 }).collect()
}

fn check_range(lo: f64, hi: f64, n: usize) -> Result<()> {
    if !lo.is_finite() || !hi.is_finite() {
        return Err(Error::InvalidRange(format!("bounds must be finite, got [{lo}, {hi}]")));
    }
    if lo >= hi {
        return Err(Error::InvalidRange(format!("need min < max, got [{lo}, {hi}]")));
    }
    if n < 2 {
        return Err(Error::InvalidRange(format!("need at least 2 points, got {n}")));
    }
    Ok(())
}

/// Zero-field spectrum against U/A with A fixed to 1; eigenvalues in units of A.
pub fn sweep_ua(ua_min: f64, ua_max: f64, n_points: usize) -> Result<SweepTable> {
    check_range(ua_min, ua_max, n_points)?;
    let axis_values = linspace(ua_min, ua_max, n_points);
    let eigenvalue_rows = axis_values
        .iter()
        .map(|&ua| {
            let params = ModelParams::zero_field(ua, 1.0)?;
            let h = build_hamiltonian(&params, &FieldVector::ZERO)?;
            Ok(eigensystem(&h)?.values)
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(SweepTable { axis_name: "U/A".into(), axis_values, eigenvalue_rows, ground_moment_rows: None })
}

/// Spectrum and ground-state moment for a field along y, from 0 to
/// `b_over_bzt_max` times the Zeeman threshold field. The axis is in units
/// of B_Zt, eigenvalues in kelvin. Levels are reported sorted, not tracked
/// through crossings.
pub fn sweep_field(params: &ModelParams, b_over_bzt_max: f64, n_points: usize) -> Result<SweepTable> {
    check_range(0.0, b_over_bzt_max, n_points)?;
    let bzt = zeeman_threshold(params);
    if bzt == 0.0 {
        return Err(Error::InvalidRange("U = 0 gives a zero threshold field; field axis is undefined".into()));
    }
    let axis_values = linspace(0.0, b_over_bzt_max, n_points);
    let mut eigenvalue_rows = Vec::with_capacity(n_points);
    let mut moments = Vec::with_capacity(n_points);
    for &ratio in &axis_values {
        let h = build_hamiltonian(params, &FieldVector::along_y(ratio * bzt))?;
        let es = eigensystem(&h)?;
        moments.push(moment_expectation(&es.ground_state(), params)?);
        eigenvalue_rows.push(es.values);
    }
    Ok(SweepTable { axis_name: "By/B_Zt".into(), axis_values, eigenvalue_rows, ground_moment_rows: Some(moments) })
}

/// B_Zt = |U| / (2 μ_y) in tesla.
pub fn zeeman_threshold(params: &ModelParams) -> f64 {
    zeeman_threshold_for(params.u(), params.mu_y()).expect("ModelParams guarantees mu_y > 0")
}

/// [`zeeman_threshold`] from raw values; rejects `mu_y <= 0` and non-finite input.
pub fn zeeman_threshold_for(u: f64, mu_y: f64) -> Result<f64> {
    if !u.is_finite() || !mu_y.is_finite() {
        return Err(Error::NonFinite("zeeman threshold input"));
    }
    if mu_y <= 0.0 {
        return Err(Error::invalid("mu_y", format!("must be > 0, got {mu_y}")));
    }
    Ok(u.abs() / (2.0 * mu_y * PhysicalConstants::CODATA.mu_b_over_k_b()))
}

/// λ₂ − λ₁ of the zero-field spectrum, in kelvin.
pub fn ground_splitting(params: &ModelParams) -> f64 {
    closed_form_zero_field(params).ground_splitting()
}

/// How to turn a measured ground splitting into a tunneling matrix element.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum ExtractionMode {
    /// Invert the exact zero-field splitting: `A = √(Δ(Δ + U)) / 2`.
    Exact,
    /// Large-U rule of thumb `Δ ≈ 4A`, i.e. `A = Δ / 4`; `U` is ignored.
    Paper,
}

/// Tunneling matrix element A (kelvin) from a ground splitting `delta` (kelvin).
///
/// The two modes do not agree: for U ≫ A the exact splitting is ≈ 4A²/U,
/// so the `Paper` rule underestimates A by a factor ≈ U/A.
pub fn extract_a(delta: f64, u: f64, mode: ExtractionMode) -> Result<f64> {
    if !delta.is_finite() {
        return Err(Error::NonFinite("delta"));
    }
    if delta < 0.0 {
        return Err(Error::invalid("delta", format!("must be >= 0, got {delta}")));
    }
    match mode {
        ExtractionMode::Paper => Ok(delta / 4.0),
        ExtractionMode::Exact => {
            if !u.is_finite() {
                return Err(Error::NonFinite("U"));
            }
            if u < 0.0 {
                return Err(Error::invalid("U", format!("exact extraction needs U >= 0, got {u}")));
            }
            Ok((delta * (delta + u)).sqrt() / 2.0)
        }
    }
}

/// Energy in kelvin to frequency in GHz.
pub fn to_frequency(delta: f64) -> f64 {
    PhysicalConstants::CODATA.kelvin_to_ghz(delta)
}

/// Notes on published frequencies that disagree with the k_B/h conversion.
///
/// Returns one note for every reference molecule whose low-barrier value
/// lies within its reported uncertainty of `delta`.
pub fn frequency_annotations(delta: f64) -> Vec<String> {
    MOLECULES
        .iter()
        .filter(|m| (delta - m.process_i.delta).abs() <= m.process_i.delta_err)
        .map(|m| {
            let f = to_frequency(m.process_i.delta);
            format!(
                "{}: barrier {} K converts to {:.2} GHz, published value is {} GHz ({:+.1}%); \
                 published figures are not mutually consistent, left unreconciled",
                m.name,
                m.process_i.delta,
                f,
                m.reported_frequency_ghz,
                100.0 * (m.reported_frequency_ghz - f) / f
            )
        })
        .collect()
}
