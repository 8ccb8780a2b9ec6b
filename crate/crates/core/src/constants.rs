//! Unit conversions between field, temperature and frequency.
//!
//! Energies are carried as E/k_B in kelvin, fields in tesla, moments in Bohr
//! magnetons and times in nanoseconds. Every conversion between these goes
//! through [`PhysicalConstants`].

use serde::Serialize;

/// μ_B/k_B in K/T.
pub const MU_B_OVER_K_B: f64 = 0.671714;
/// k_B/h in GHz/K.
pub const K_B_OVER_H: f64 = 20.836619;

/// Conversion factors used throughout the crate.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PhysicalConstants {
    mu_b_over_k_b: f64,
    k_b_over_h: f64,
}

impl PhysicalConstants {
    pub const CODATA: PhysicalConstants = PhysicalConstants { mu_b_over_k_b: MU_B_OVER_K_B, k_b_over_h: K_B_OVER_H };

    pub const fn codata() -> Self {
        Self::CODATA
    }

    /// Kelvin per (tesla · Bohr magneton).
    pub const fn mu_b_over_k_b(&self) -> f64 {
        self.mu_b_over_k_b
    }

    /// Gigahertz per kelvin.
    pub const fn k_b_over_h(&self) -> f64 {
        self.k_b_over_h
    }

    /// Zeeman energy (kelvin) of a moment `moment` (μ_B) in a field `field` (T).
    pub fn zeeman_kelvin(&self, moment: f64, field: f64) -> f64 {
        moment * field * self.mu_b_over_k_b
    }

    pub fn kelvin_to_ghz(&self, energy: f64) -> f64 {
        energy * self.k_b_over_h
    }

    /// Angular frequency in rad/ns for an energy in kelvin.
    pub fn kelvin_to_rad_per_ns(&self, energy: f64) -> f64 {
        2.0 * std::f64::consts::PI * self.kelvin_to_ghz(energy)
    }
}

impl Default for PhysicalConstants {
    fn default() -> Self {
        Self::CODATA
    }
}
