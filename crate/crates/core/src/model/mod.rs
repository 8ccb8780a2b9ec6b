//! Four-state pseudospin model of a coupled anisotropic 4f-ion pair.
//!
//! The basis is ordered `{|1⟩, |1̄⟩, |2⟩, |2̄⟩}`. `(|1⟩, |1̄⟩)` is the
//! ferromagnetically coupled time-reversal doublet (TRD1, moments along ±x)
//! and `(|2⟩, |2̄⟩)` the antiferromagnetic one (TRD2, moments along ±y),
//! split from TRD1 by the exchange/dipolar energy `U`. Single pseudospin
//! flips connect every TRD1 state to every TRD2 state with matrix element
//! `-A`; double flips across the diagonals of the square are zero.

mod dynamics;
mod jacobi;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::constants::PhysicalConstants;
use crate::error::{Error, Result};

pub use dynamics::{evolve, Propagator};
pub use jacobi::{eigensystem, JACOBI_MAX_SWEEPS, JACOBI_REL_TOL};

/// Number of pseudospin configurations.
pub const DIM: usize = 4;

/// Labels of the four basis configurations, in matrix order.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum BasisState {
    One,
    OneBar,
    Two,
    TwoBar,
}

impl BasisState {
    pub const ALL: [BasisState; 4] = [BasisState::One, BasisState::OneBar, BasisState::Two, BasisState::TwoBar];

    pub fn index(self) -> usize {
        match self {
            BasisState::One => 0,
            BasisState::OneBar => 1,
            BasisState::Two => 2,
            BasisState::TwoBar => 3,
        }
    }

    pub fn label(self) -> &'static str {
        match self {
            BasisState::One => "1",
            BasisState::OneBar => "1bar",
            BasisState::Two => "2",
            BasisState::TwoBar => "2bar",
        }
    }
}

impl std::str::FromStr for BasisState {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        BasisState::ALL
            .into_iter()
            .find(|b| b.label() == s)
            .ok_or_else(|| Error::invalid("basis_state", format!("unknown label `{s}` (expected 1, 1bar, 2, 2bar)")))
    }
}

/// Physical parameters of one dimer.
///
/// `u` and `a` are energies divided by k_B (kelvin); `mu_x`, `mu_y` are the
/// pseudospin-pair moment components in Bohr magnetons. A basis state of
/// TRD1 carries ±2·mu_x along x, a state of TRD2 carries ±2·mu_y along y.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ModelParams {
    u: f64,
    a: f64,
    mu_x: f64,
    mu_y: f64,
}

impl ModelParams {
    /// `u` may have either sign (negative means an antiferromagnetic ground
    /// doublet). `a` must be non-negative and both moments positive.
    pub fn new(u: f64, a: f64, mu_x: f64, mu_y: f64) -> Result<Self> {
        for (name, v) in [("U", u), ("A", a), ("mu_x", mu_x), ("mu_y", mu_y)] {
            if !v.is_finite() {
                return Err(Error::invalid(name, format!("must be finite, got {v}")));
            }
        }
        if a < 0.0 {
            return Err(Error::invalid("A", format!("must be >= 0, got {a}")));
        }
        if mu_x <= 0.0 {
            return Err(Error::invalid("mu_x", format!("must be > 0, got {mu_x}")));
        }
        if mu_y <= 0.0 {
            return Err(Error::invalid("mu_y", format!("must be > 0, got {mu_y}")));
        }
        Ok(Self { u, a, mu_x, mu_y })
    }

    /// Zero-field spectrum only depends on `U` and `A`; moments default to 1 μ_B.
    pub fn zero_field(u: f64, a: f64) -> Result<Self> {
        Self::new(u, a, 1.0, 1.0)
    }

    pub fn u(&self) -> f64 {
        self.u
    }

    pub fn a(&self) -> f64 {
        self.a
    }

    pub fn mu_x(&self) -> f64 {
        self.mu_x
    }

    pub fn mu_y(&self) -> f64 {
        self.mu_y
    }
}

/// Applied magnetic field in tesla.
///
/// The pseudospin moments lie in the x–y plane, so `bz` couples to nothing.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct FieldVector {
    pub bx: f64,
    pub by: f64,
    pub bz: f64,
}

impl FieldVector {
    pub const ZERO: FieldVector = FieldVector { bx: 0.0, by: 0.0, bz: 0.0 };

    pub fn new(bx: f64, by: f64, bz: f64) -> Self {
        Self { bx, by, bz }
    }

    pub fn along_x(bx: f64) -> Self {
        Self { bx, ..Self::ZERO }
    }

    pub fn along_y(by: f64) -> Self {
        Self { by, ..Self::ZERO }
    }

    fn is_finite(&self) -> bool {
        self.bx.is_finite() && self.by.is_finite() && self.bz.is_finite()
    }
}

/// Real symmetric 4×4 matrix, entries in kelvin.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SymmetricMatrix4 {
    entries: [[f64; DIM]; DIM],
}

impl SymmetricMatrix4 {
    /// Fails unless `entries[i][j] == entries[j][i]` bit for bit.
    pub fn from_rows(entries: [[f64; DIM]; DIM]) -> Result<Self> {
        for i in 0..DIM {
            for j in (i + 1)..DIM {
                if entries[i][j].to_bits() != entries[j][i].to_bits() {
                    return Err(Error::invalid(
                        "matrix",
                        format!("not symmetric at ({i},{j}): {} vs {}", entries[i][j], entries[j][i]),
                    ));
                }
            }
        }
        Ok(Self { entries })
    }

    pub fn diagonal(d: [f64; DIM]) -> Self {
        let mut entries = [[0.0; DIM]; DIM];
        for i in 0..DIM {
            entries[i][i] = d[i];
        }
        Self { entries }
    }

    pub fn entry(&self, i: usize, j: usize) -> f64 {
        self.entries[i][j]
    }

    pub fn rows(&self) -> &[[f64; DIM]; DIM] {
        &self.entries
    }

    pub fn diag(&self) -> [f64; DIM] {
        std::array::from_fn(|i| self.entries[i][i])
    }

    pub fn trace(&self) -> f64 {
        self.diag().iter().sum()
    }

    /// Largest absolute entry.
    pub fn max_norm(&self) -> f64 {
        self.entries.iter().flatten().fold(0.0_f64, |m, &x| m.max(x.abs()))
    }

    pub fn mul_vec(&self, v: &[f64; DIM]) -> [f64; DIM] {
        std::array::from_fn(|i| (0..DIM).map(|j| self.entries[i][j] * v[j]).sum())
    }
}

/// Sorted spectral decomposition of a [`SymmetricMatrix4`].
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct EigenSystem {
    /// Eigenvalues in kelvin, ascending.
    pub values: [f64; DIM],
    /// `vectors[i]` holds the amplitudes `(a_1, a_1̄, a_2, a_2̄)` of the
    /// eigenvector for `values[i]`.
    pub vectors: [[f64; DIM]; DIM],
}

impl EigenSystem {
    /// Sorts pairs ascending by eigenvalue and applies [`canonical_sign`] to
    /// every vector.
    pub(crate) fn from_pairs(mut pairs: [(f64, [f64; DIM]); DIM]) -> Self {
        pairs.sort_by(|x, y| x.0.total_cmp(&y.0));
        let values = pairs.map(|p| p.0);
        let vectors = pairs.map(|p| canonical_sign(p.1));
        Self { values, vectors }
    }

    pub fn ground_state(&self) -> StateVector {
        self.state(0)
    }

    pub fn state(&self, i: usize) -> StateVector {
        StateVector::from_real(self.vectors[i])
    }

    /// λ₂ − λ₁.
    pub fn ground_splitting(&self) -> f64 {
        self.values[1] - self.values[0]
    }

    /// |Φ_i⟩⟨Φ_i|.
    pub fn projector(&self, i: usize) -> [[f64; DIM]; DIM] {
        let v = &self.vectors[i];
        std::array::from_fn(|r| std::array::from_fn(|c| v[r] * v[c]))
    }

    /// Sum of projectors of all eigenvalues within `tol` of `values[i]`.
    ///
    /// Individual eigenvectors are not unique inside a degenerate subspace;
    /// the projector onto the whole cluster is.
    pub fn cluster_projector(&self, i: usize, tol: f64) -> [[f64; DIM]; DIM] {
        let mut p = [[0.0; DIM]; DIM];
        for k in 0..DIM {
            if (self.values[k] - self.values[i]).abs() <= tol {
                let pk = self.projector(k);
                for r in 0..DIM {
                    for c in 0..DIM {
                        p[r][c] += pk[r][c];
                    }
                }
            }
        }
        p
    }
}

/// Flip `v` so that its component of largest magnitude is positive.
///
/// Components within a relative 1e-9 of the largest count as tied; the first
/// of them decides.
pub fn canonical_sign(v: [f64; DIM]) -> [f64; DIM] {
    let max = v.iter().fold(0.0_f64, |m, x| m.max(x.abs()));
    let lead = v.iter().find(|x| x.abs() >= max * (1.0 - 1e-9)).copied().unwrap_or(0.0);
    if lead < 0.0 {
        v.map(|x| -x)
    } else {
        v
    }
}

/// State in the `{|1⟩, |1̄⟩, |2⟩, |2̄⟩}` basis.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct StateVector {
    pub amplitudes: [Complex64; DIM],
}

impl StateVector {
    pub fn new(amplitudes: [Complex64; DIM]) -> Self {
        Self { amplitudes }
    }

    pub fn from_real(v: [f64; DIM]) -> Self {
        Self { amplitudes: v.map(|x| Complex64::new(x, 0.0)) }
    }

    pub fn basis(state: BasisState) -> Self {
        let mut v = [0.0; DIM];
        v[state.index()] = 1.0;
        Self::from_real(v)
    }

    pub fn norm(&self) -> f64 {
        self.amplitudes.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt()
    }

    /// Scales to unit norm; fails for the zero vector or non-finite input.
    pub fn normalized(&self) -> Result<Self> {
        let n = self.norm();
        if !n.is_finite() || n == 0.0 {
            return Err(Error::invalid("state", "cannot normalize zero or non-finite state"));
        }
        Ok(Self { amplitudes: self.amplitudes.map(|a| a / n) })
    }

    /// |a_j|² for each basis state.
    pub fn populations(&self) -> [f64; DIM] {
        self.amplitudes.map(|a| a.norm_sqr())
    }

    /// ⟨self|other⟩.
    pub fn inner(&self, other: &StateVector) -> Complex64 {
        self.amplitudes.iter().zip(&other.amplitudes).map(|(a, b)| a.conj() * b).sum()
    }
}

/// Magnetic moment expectation in Bohr magnetons. `mz` is always zero here.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct MomentVector {
    pub mx: f64,
    pub my: f64,
    pub mz: f64,
}

impl MomentVector {
    pub fn magnitude(&self) -> f64 {
        (self.mx * self.mx + self.my * self.my + self.mz * self.mz).sqrt()
    }
}

/// Tunneling Hamiltonian of the pair in an applied field.
///
/// Off-diagonal: `-A` on every single-flip element `{1,1̄}×{2,2̄}`, zero on
/// the double flips `1↔1̄` and `2↔2̄`. Diagonal (kelvin):
///
/// ```text
/// ( -2μx·Bx·c,  +2μx·Bx·c,  U - 2μy·By·c,  U + 2μy·By·c ),   c = μ_B/k_B
/// ```
///
/// `field.bz` has no effect: the moments lie in the x–y plane. A non-zero
/// `bz` is logged as a warning.
pub fn build_hamiltonian(params: &ModelParams, field: &FieldVector) -> Result<SymmetricMatrix4> {
    if !field.is_finite() {
        return Err(Error::NonFinite("field"));
    }
    if field.bz != 0.0 {
        log::warn!("Bz = {} T ignored: pseudospin moments have no z component", field.bz);
    }
    let k = PhysicalConstants::CODATA;
    let ex = k.zeeman_kelvin(2.0 * params.mu_x, field.bx);
    let ey = k.zeeman_kelvin(2.0 * params.mu_y, field.by);
    let u = params.u;
    let t = -params.a;
    Ok(SymmetricMatrix4 { entries: [[-ex, 0.0, t, t], [0.0, ex, t, t], [t, t, u - ey, 0.0], [t, t, 0.0, u + ey]] })
}

/// Exact zero-field eigensystem.
///
/// The antisymmetric combinations `(|1⟩ − |1̄⟩)/√2` and `(|2⟩ − |2̄⟩)/√2`
/// decouple with energies `0` and `U`. The symmetric combinations mix
/// through `[[0, −2A], [−2A, U]]`, giving `(U ∓ √(U² + 16A²))/2`.
pub fn closed_form_zero_field(params: &ModelParams) -> EigenSystem {
    let (u, a) = (params.u, params.a);
    let s = (u * u + 16.0 * a * a).sqrt();
    // product of the symmetric-sector roots is -4A²; take the
    // cancellation-free root first
    let (lo, hi) = if u >= 0.0 {
        let hi = 0.5 * (u + s);
        let lo = if hi == 0.0 { 0.0 } else { -4.0 * a * a / hi };
        (lo, hi)
    } else {
        let lo = 0.5 * (u - s);
        (lo, -4.0 * a * a / lo)
    };

    // eigenvector of the larger root of [[0,b],[b,U]] is (cos θ, sin θ),
    // θ = atan2(2b, −U)/2
    let theta = 0.5 * (-4.0 * a).atan2(-u);
    let (sin, cos) = theta.sin_cos();
    let r = std::f64::consts::FRAC_1_SQRT_2;
    let hi_vec = [cos * r, cos * r, sin * r, sin * r];
    let lo_vec = [-sin * r, -sin * r, cos * r, cos * r];

    EigenSystem::from_pairs([(lo, lo_vec), (0.0, [-r, r, 0.0, 0.0]), (u, [0.0, 0.0, -r, r]), (hi, hi_vec)])
}

/// Deviation from unit norm tolerated by [`moment_expectation`].
pub const NORM_TOLERANCE: f64 = 1e-9;

/// ⟨Ψ|M|Ψ⟩ with per-state moments `(+2μx x̂, −2μx x̂, +2μy ŷ, −2μy ŷ)`.
pub fn moment_expectation(state: &StateVector, params: &ModelParams) -> Result<MomentVector> {
    let deviation = (state.norm() - 1.0).abs();
    if !(deviation <= NORM_TOLERANCE) {
        return Err(Error::NotNormalized { deviation });
    }
    let p = state.populations();
    Ok(MomentVector { mx: 2.0 * params.mu_x * (p[0] - p[1]), my: 2.0 * params.mu_y * (p[2] - p[3]), mz: 0.0 })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p(u: f64, a: f64) -> ModelParams {
        ModelParams::new(u, a, 10.0, 10.0).unwrap()
    }

    #[test]
    fn zero_field_structure() {
        let h = build_hamiltonian(&p(10.0, 1.0), &FieldVector::ZERO).unwrap();
        assert_eq!(h.diag(), [0.0, 0.0, 10.0, 10.0]);
        for (i, j) in [(0, 2), (0, 3), (1, 2), (1, 3)] {
            assert_eq!(h.entry(i, j), -1.0);
            assert_eq!(h.entry(j, i), -1.0);
        }
        assert_eq!(h.entry(0, 1), 0.0);
        assert_eq!(h.entry(2, 3), 0.0);
    }

    #[test]
    fn no_tunneling_is_diagonal() {
        let h = build_hamiltonian(&p(10.0, 0.0), &FieldVector::ZERO).unwrap();
        assert_eq!(h, SymmetricMatrix4::diagonal([0.0, 0.0, 10.0, 10.0]));
    }

    #[test]
    fn threshold_field_zeroes_state_two() {
        let by: f64 = 10.0 / (2.0 * 10.0 * 0.671714);
        assert!((by - 0.74437).abs() < 1e-5);
        let h = build_hamiltonian(&p(10.0, 1.0), &FieldVector::along_y(by)).unwrap();
        let d = h.diag();
        assert_eq!(d[0], 0.0);
        assert_eq!(d[1], 0.0);
        assert!(d[2].abs() < 1e-12);
        assert!((d[3] - 20.0).abs() < 1e-12);
    }

    #[test]
    fn x_field_splits_trd1() {
        let h = build_hamiltonian(&p(10.0, 1.0), &FieldVector::along_x(1.0)).unwrap();
        let e = 2.0 * 10.0 * 0.671714;
        assert_eq!(h.diag(), [-e, e, 10.0, 10.0]);
    }

    #[test]
    fn bz_has_no_effect() {
        let a = build_hamiltonian(&p(3.0, 0.5), &FieldVector::new(0.2, 0.3, 0.0)).unwrap();
        let b = build_hamiltonian(&p(3.0, 0.5), &FieldVector::new(0.2, 0.3, 7.0)).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn rejects_bad_inputs() {
        assert!(ModelParams::new(f64::NAN, 1.0, 1.0, 1.0).is_err());
        assert!(ModelParams::new(1.0, -1.0, 1.0, 1.0).is_err());
        assert!(ModelParams::new(1.0, 1.0, 0.0, 1.0).is_err());
        assert!(ModelParams::new(1.0, 1.0, 1.0, -2.0).is_err());
        assert!(build_hamiltonian(&p(1.0, 1.0), &FieldVector::along_y(f64::INFINITY)).is_err());
        assert!(SymmetricMatrix4::from_rows([[0.0, 1.0, 0.0, 0.0], [0.0; 4], [0.0; 4], [0.0; 4]]).is_err());
    }

    #[test]
    fn closed_form_table_values() {
        let es = closed_form_zero_field(&p(10.0, 1.0));
        let s = 116.0_f64.sqrt();
        let expect = [(10.0 - s) / 2.0, 0.0, 10.0, (10.0 + s) / 2.0];
        for i in 0..4 {
            assert!((es.values[i] - expect[i]).abs() < 1e-13);
        }
        assert!((es.values[0] + 0.3851648).abs() < 1e-7);
        let g = es.vectors[0];
        // 2×2 symmetric-sector eigenvector, normalized by hand
        let y: f64 = 0.385164807134504 / 2.0;
        let n = (2.0 * (1.0 + y * y)).sqrt();
        for (k, want) in [1.0 / n, 1.0 / n, y / n, y / n].into_iter().enumerate() {
            assert!((g[k] - want).abs() < 1e-9, "{g:?}");
        }
        assert!((g[0] - 0.694348).abs() < 1e-6 && (g[2] - 0.133719).abs() < 1e-6);
    }

    #[test]
    fn closed_form_degenerate_cases() {
        assert_eq!(closed_form_zero_field(&p(10.0, 0.0)).values, [0.0, 0.0, 10.0, 10.0]);
        let es = closed_form_zero_field(&p(0.0, 1.0));
        let expect = [-2.0, 0.0, 0.0, 2.0];
        for i in 0..4 {
            assert!((es.values[i] - expect[i]).abs() < 1e-14);
        }
        let es = closed_form_zero_field(&p(-6.0, 2.0));
        assert!(es.values.windows(2).all(|w| w[0] <= w[1]));
        assert!((es.values[0] - (-6.0 - 100.0_f64.sqrt()) / 2.0).abs() < 1e-13);
    }

    #[test]
    fn closed_form_vectors_are_eigenvectors() {
        for (u, a) in [(10.0, 1.0), (-3.0, 0.7), (0.0, 2.0), (5.0, 0.0), (0.0, 0.0)] {
            let params = p(u, a);
            let h = build_hamiltonian(&params, &FieldVector::ZERO).unwrap();
            let es = closed_form_zero_field(&params);
            for i in 0..4 {
                let hv = h.mul_vec(&es.vectors[i]);
                for k in 0..4 {
                    assert!((hv[k] - es.values[i] * es.vectors[i][k]).abs() < 1e-12, "U={u} A={a} i={i}");
                }
            }
        }
    }

    #[test]
    fn basis_moments() {
        let params = p(10.0, 1.0);
        let m = moment_expectation(&StateVector::basis(BasisState::Two), &params).unwrap();
        assert_eq!(m, MomentVector { mx: 0.0, my: 20.0, mz: 0.0 });
        let m = moment_expectation(&StateVector::basis(BasisState::OneBar), &params).unwrap();
        assert_eq!(m, MomentVector { mx: -20.0, my: 0.0, mz: 0.0 });
    }

    #[test]
    fn moment_requires_normalized_state() {
        let s = StateVector::from_real([1.0, 1.0, 0.0, 0.0]);
        assert!(matches!(moment_expectation(&s, &p(1.0, 1.0)), Err(Error::NotNormalized { .. })));
        assert!(moment_expectation(&s.normalized().unwrap(), &p(1.0, 1.0)).is_ok());
    }

    #[test]
    fn sign_convention_tie_takes_first() {
        let r = std::f64::consts::FRAC_1_SQRT_2;
        assert_eq!(canonical_sign([-r, r, 0.0, 0.0]), [r, -r, 0.0, 0.0]);
        assert_eq!(canonical_sign([0.1, 0.1, -0.7, -0.7]), [-0.1, -0.1, 0.7, 0.7]);
    }

    #[test]
    fn basis_labels_parse() {
        for b in BasisState::ALL {
            assert_eq!(b.label().parse::<BasisState>().unwrap(), b);
        }
        assert!("3".parse::<BasisState>().is_err());
    }
}
