//! Published parameters of two endohedral-fullerene dimer magnets.
//!
//! Kept as regression constants. Quantities such as the threshold fields
//! depend on U and μ_y values that are not part of this data set, so they
//! are stored as reported rather than recomputed.

use crate::relaxation::{ArrheniusProcess, RelaxationModel};

/// One Arrhenius channel with its reported one-sigma uncertainties.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ReportedProcess {
    pub tau0: f64,
    pub tau0_err: f64,
    pub delta: f64,
    pub delta_err: f64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Molecule {
    pub name: &'static str,
    /// Low-barrier channel (ground-state tunneling splitting).
    pub process_i: ReportedProcess,
    /// High-barrier channel (decay through the excited doublet).
    pub process_ii: ReportedProcess,
    /// Reported Δ_I/h in GHz.
    pub reported_frequency_ghz: f64,
    /// Reported A/k_B in kelvin.
    pub reported_a: f64,
    /// Reported U/A.
    pub reported_u_over_a: f64,
    /// Reported Zeeman threshold field in tesla.
    pub reported_threshold_field: f64,
}

impl Molecule {
    pub fn relaxation_model(&self) -> RelaxationModel {
        RelaxationModel::new(vec![
            ArrheniusProcess::new(self.process_i.tau0, self.process_i.delta).expect("valid constant"),
            ArrheniusProcess::new(self.process_ii.tau0, self.process_ii.delta).expect("valid constant"),
        ])
        .expect("valid constant")
    }
}

pub const DY2S_C82: Molecule = Molecule {
    name: "Dy2S@C82",
    process_i: ReportedProcess { tau0: 4.0e2, tau0_err: 0.3e2, delta: 0.34, delta_err: 0.03 },
    process_ii: ReportedProcess { tau0: 2.1e-3, tau0_err: 1.3e-3, delta: 16.1, delta_err: 1.1 },
    reported_frequency_ghz: 6.3,
    reported_a: 0.085,
    reported_u_over_a: 40.0,
    reported_threshold_field: 1.9,
};

pub const TB2SCN_C80: Molecule = Molecule {
    name: "Tb2ScN@C80",
    process_i: ReportedProcess { tau0: 1.9e1, tau0_err: 0.2e1, delta: 0.97, delta_err: 0.04 },
    process_ii: ReportedProcess { tau0: 8.9e-3, tau0_err: 1.0e-3, delta: 10.0, delta_err: 0.2 },
    reported_frequency_ghz: 20.8,
    reported_a: 0.250,
    reported_u_over_a: 190.0,
    reported_threshold_field: 1.6,
};

pub const MOLECULES: [Molecule; 2] = [DY2S_C82, TB2SCN_C80];
