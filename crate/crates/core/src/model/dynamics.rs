use num_complex::Complex64;

use super::{eigensystem, EigenSystem, StateVector, SymmetricMatrix4, DIM};
use crate::constants::PhysicalConstants;
use crate::error::Result;

/// Coherent time evolution under a fixed Hamiltonian.
///
/// Holds the eigensystem so that a time trace costs one spectral sum per
/// point. Times are in nanoseconds; an energy of 1 K advances the phase at
/// 2π · 20.836619 rad/ns.
#[derive(Debug, Clone)]
pub struct Propagator {
    spectrum: EigenSystem,
    omega: [f64; DIM],
}

impl Propagator {
    pub fn new(h: &SymmetricMatrix4) -> Result<Self> {
        Ok(Self::from_eigensystem(eigensystem(h)?))
    }

    pub fn from_eigensystem(spectrum: EigenSystem) -> Self {
        let k = PhysicalConstants::CODATA;
        let omega = spectrum.values.map(|e| k.kelvin_to_rad_per_ns(e));
        Self { spectrum, omega }
    }

    pub fn spectrum(&self) -> &EigenSystem {
        &self.spectrum
    }

    /// `Σ_i ⟨Φ_i|ψ⟩ · exp(−i ω_i t) · |Φ_i⟩`.
    pub fn evolve(&self, initial: &StateVector, t_ns: f64) -> StateVector {
        let mut out = [Complex64::new(0.0, 0.0); DIM];
        for (vec, &w) in self.spectrum.vectors.iter().zip(&self.omega) {
            let overlap: Complex64 = vec.iter().zip(&initial.amplitudes).map(|(v, a)| a * v).sum();
            let c = overlap * Complex64::from_polar(1.0, -w * t_ns);
            for (o, v) in out.iter_mut().zip(vec) {
                *o += c * v;
            }
        }
        StateVector::new(out)
    }
}

/// Propagate `initial` for `t_ns` nanoseconds under `h`.
pub fn evolve(initial: &StateVector, h: &SymmetricMatrix4, t_ns: f64) -> Result<StateVector> {
    Ok(Propagator::new(h)?.evolve(initial, t_ns))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{build_hamiltonian, moment_expectation, BasisState, FieldVector, ModelParams};

    fn h10() -> (ModelParams, SymmetricMatrix4) {
        let p = ModelParams::new(10.0, 1.0, 10.0, 10.0).unwrap();
        (p, build_hamiltonian(&p, &FieldVector::ZERO).unwrap())
    }

    #[test]
    fn identity_at_zero_time() {
        let (_, h) = h10();
        let s = StateVector::basis(BasisState::One);
        let out = evolve(&s, &h, 0.0).unwrap();
        for k in 0..4 {
            assert!((out.amplitudes[k] - s.amplitudes[k]).norm() < 1e-14);
        }
    }

    #[test]
    fn eigenstate_is_stationary() {
        let (p, _) = h10();
        let h = build_hamiltonian(&p, &FieldVector::new(0.1, 0.4, 0.0)).unwrap();
        let prop = Propagator::new(&h).unwrap();
        let phi = prop.spectrum().state(0);
        let m0 = moment_expectation(&phi, &p).unwrap();
        for t in [0.01, 0.3, 7.0] {
            let out = prop.evolve(&phi, t);
            assert!((out.inner(&phi).norm() - 1.0).abs() < 1e-12);
            let m = moment_expectation(&out, &p).unwrap();
            assert!((m.mx - m0.mx).abs() < 1e-10 && (m.my - m0.my).abs() < 1e-10);
        }
    }

    #[test]
    fn norm_and_reversibility() {
        let (_, h) = h10();
        let prop = Propagator::new(&h).unwrap();
        let s = StateVector::from_real([0.5, -0.5, 0.5, 0.5]);
        for t in [0.013, 1.7, 42.0] {
            let fwd = prop.evolve(&s, t);
            assert!((fwd.norm() - 1.0).abs() < 1e-12);
            let back = prop.evolve(&fwd, -t);
            for k in 0..4 {
                assert!((back.amplitudes[k] - s.amplitudes[k]).norm() < 1e-10);
            }
        }
    }
}
