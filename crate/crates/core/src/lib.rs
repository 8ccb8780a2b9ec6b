//! Pseudospin model of coupled anisotropic 4f-ion pairs.
//!
//! The ground manifold of a lanthanide dimer with axial single-ion anisotropy
//! is four pseudospin configurations `{|1⟩, |1̄⟩, |2⟩, |2̄⟩}`. Tunneling of
//! single pseudospins (matrix element `A`) mixes them and lifts the
//! zero-field degeneracy of the ground doublet; an applied field adds Zeeman
//! terms and produces a level crossing at the threshold field
//! `B_Zt = U / 2μ_y`.
//!
//! - [`model`]: Hamiltonian construction, exact and Jacobi diagonalization,
//!   moment expectations, coherent time evolution.
//! - [`analysis`]: spectrum sweeps against U/A and field, extraction of A,
//!   frequencies and threshold fields.
//! - [`relaxation`]: parallel-channel Arrhenius lifetimes, synthetic data and
//!   a damped Gauss–Newton fitter.
//! - [`cli`]: the `pseudospin` command-line front end.
//!
//! Units: energies are E/k_B in kelvin, fields in tesla, moments in Bohr
//! magnetons, times in nanoseconds (dynamics) or seconds (lifetimes).

// small fixed-size matrices read best with index loops; `!(x > 0.0)` is
// used on purpose so NaN fails the check
#![allow(clippy::needless_range_loop, clippy::neg_cmp_op_on_partial_ord)]

pub mod analysis;
pub mod cli;
pub mod constants;
pub mod error;
pub mod format;
pub mod model;
pub mod reference;
pub mod relaxation;

pub use constants::PhysicalConstants;
pub use error::{Error, Result};
