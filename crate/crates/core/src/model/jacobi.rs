use super::{EigenSystem, SymmetricMatrix4, DIM};
use crate::error::{Error, Result};

/// Convergence threshold on the largest off-diagonal magnitude, relative to
/// the max-norm of the input.
pub const JACOBI_REL_TOL: f64 = 1e-14;
pub const JACOBI_MAX_SWEEPS: usize = 100;

/// Numeric eigensystem of a symmetric 4×4 matrix by cyclic Jacobi rotations.
///
/// Each sweep rotates away every off-diagonal pair `(p, q)` in row order.
/// Iteration stops once the largest off-diagonal magnitude drops below
/// `JACOBI_REL_TOL · max|H_ij|`. Output is sorted ascending with the sign
/// convention of [`super::canonical_sign`].
pub fn eigensystem(h: &SymmetricMatrix4) -> Result<EigenSystem> {
    let mut a = *h.rows();
    let mut v = [[0.0; DIM]; DIM];
    for (i, row) in v.iter_mut().enumerate() {
        row[i] = 1.0;
    }
    let tol = JACOBI_REL_TOL * h.max_norm();

    let settled = |a: &[[f64; DIM]; DIM]| {
        let off = off_diagonal_max(a);
        (off == 0.0 || off < tol, off)
    };
    let mut sweeps = 0;
    loop {
        let (done, off) = settled(&a);
        if done {
            break;
        }
        if sweeps == JACOBI_MAX_SWEEPS {
            return Err(Error::NoConvergence { sweeps, residual: off });
        }
        for p in 0..DIM - 1 {
            for q in p + 1..DIM {
                rotate(&mut a, &mut v, p, q);
            }
        }
        sweeps += 1;
    }

    // columns of v are eigenvectors
    let pairs = std::array::from_fn(|i| (a[i][i], std::array::from_fn(|k| v[k][i])));
    Ok(EigenSystem::from_pairs(pairs))
}

fn off_diagonal_max(a: &[[f64; DIM]; DIM]) -> f64 {
    let mut m = 0.0_f64;
    for p in 0..DIM {
        for q in p + 1..DIM {
            let x = a[p][q].abs();
            // propagate NaN so it can never look converged
            if x.is_nan() {
                return f64::NAN;
            }
            m = m.max(x);
        }
    }
    m
}

/// One similarity rotation `A ← JᵀAJ`, `V ← VJ` annihilating `A[p][q]`.
fn rotate(a: &mut [[f64; DIM]; DIM], v: &mut [[f64; DIM]; DIM], p: usize, q: usize) {
    let apq = a[p][q];
    if apq == 0.0 {
        return;
    }
    let tau = (a[q][q] - a[p][p]) / (2.0 * apq);
    let t = if tau >= 0.0 { 1.0 / (tau + tau.hypot(1.0)) } else { -1.0 / (-tau + tau.hypot(1.0)) };
    let c = 1.0 / t.hypot(1.0);
    let s = t * c;

    for row in a.iter_mut() {
        let (akp, akq) = (row[p], row[q]);
        row[p] = c * akp - s * akq;
        row[q] = s * akp + c * akq;
    }
    for k in 0..DIM {
        let (apk, aqk) = (a[p][k], a[q][k]);
        a[p][k] = c * apk - s * aqk;
        a[q][k] = s * apk + c * aqk;
    }
    a[p][q] = 0.0;
    a[q][p] = 0.0;
    for row in v.iter_mut() {
        let (vkp, vkq) = (row[p], row[q]);
        row[p] = c * vkp - s * vkq;
        row[q] = s * vkp + c * vkq;
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{build_hamiltonian, FieldVector, ModelParams};

    #[test]
    fn table_spectrum() {
        let params = ModelParams::new(10.0, 1.0, 1.0, 1.0).unwrap();
        let es = eigensystem(&build_hamiltonian(&params, &FieldVector::ZERO).unwrap()).unwrap();
        let expect = [-0.3851648, 0.0, 10.0, 10.3851648];
        for i in 0..4 {
            assert!((es.values[i] - expect[i]).abs() < 1e-7, "{:?}", es.values);
        }
        let g = es.vectors[0];
        for (x, want) in g.iter().zip([0.69, 0.69, 0.13, 0.13]) {
            assert!((x - want).abs() < 0.005);
        }
    }

    #[test]
    fn diagonal_input_is_identity() {
        let es = eigensystem(&SymmetricMatrix4::diagonal([10.0, 0.0, 10.0, 0.0])).unwrap();
        assert_eq!(es.values, [0.0, 0.0, 10.0, 10.0]);
        for v in es.vectors {
            assert_eq!(v.iter().filter(|x| **x == 1.0).count(), 1);
        }
    }

    #[test]
    fn zero_matrix() {
        let es = eigensystem(&SymmetricMatrix4::diagonal([0.0; 4])).unwrap();
        assert_eq!(es.values, [0.0; 4]);
    }

    #[test]
    fn nan_input_fails_with_residual() {
        let mut rows = [[0.0; 4]; 4];
        rows[0][1] = f64::NAN;
        rows[1][0] = f64::NAN;
        // from_rows compares bits, NaN payloads are identical here
        let h = SymmetricMatrix4::from_rows(rows).unwrap();
        match eigensystem(&h) {
            Err(Error::NoConvergence { sweeps, residual }) => {
                assert_eq!(sweeps, JACOBI_MAX_SWEEPS);
                assert!(residual.is_nan());
            }
            other => panic!("expected NoConvergence, got {other:?}"),
        }
    }

    #[test]
    fn dense_matrix_residuals() {
        let rows = [[4.0, -1.0, 2.0, 0.5], [-1.0, 3.0, 0.25, -2.0], [2.0, 0.25, -5.0, 1.5], [0.5, -2.0, 1.5, 0.0]];
        let h = SymmetricMatrix4::from_rows(rows).unwrap();
        let es = eigensystem(&h).unwrap();
        for i in 0..4 {
            let hv = h.mul_vec(&es.vectors[i]);
            for k in 0..4 {
                assert!((hv[k] - es.values[i] * es.vectors[i][k]).abs() < 1e-10 * es.values[i].abs().max(1.0));
            }
            for j in 0..4 {
                let d: f64 = (0..4).map(|k| es.vectors[i][k] * es.vectors[j][k]).sum();
                let want = if i == j { 1.0 } else { 0.0 };
                assert!((d - want).abs() < 1e-12);
            }
        }
        assert!((es.values.iter().sum::<f64>() - h.trace()).abs() < 1e-12);
    }
}
