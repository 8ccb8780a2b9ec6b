#![allow(clippy::needless_range_loop)]

use proptest::prelude::*;

use pseudospin::analysis::{
    extract_a, ground_splitting, sweep_field, sweep_ua, zeeman_threshold, zeeman_threshold_for, ExtractionMode,
};
use pseudospin::constants::MU_B_OVER_K_B;
use pseudospin::model::{
    build_hamiltonian, closed_form_zero_field, eigensystem, evolve, moment_expectation, BasisState, EigenSystem,
    FieldVector, ModelParams, StateVector,
};
use pseudospin::relaxation::{model_lifetime, ArrheniusProcess, RelaxationModel};

fn params(u: f64, a: f64, mu_x: f64, mu_y: f64) -> ModelParams {
    ModelParams::new(u, a, mu_x, mu_y).unwrap()
}

fn spectrum(p: &ModelParams, f: FieldVector) -> EigenSystem {
    eigensystem(&build_hamiltonian(p, &f).unwrap()).unwrap()
}

fn min_gap(es: &EigenSystem) -> f64 {
    es.values.windows(2).map(|w| w[1] - w[0]).fold(f64::INFINITY, f64::min)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(256))]

    #[test]
    fn trace_is_conserved(
        u in -50.0..50.0f64, a in 0.0..10.0f64, mx in 0.1..20.0f64, my in 0.1..20.0f64,
        bx in -5.0..5.0f64, by in -5.0..5.0f64,
    ) {
        let p = params(u, a, mx, my);
        let h = build_hamiltonian(&p, &FieldVector::new(bx, by, 0.0)).unwrap();
        let es = eigensystem(&h).unwrap();
        prop_assert!((h.trace() - 2.0 * u).abs() <= 1e-12 * (1.0 + u.abs()));
        let sum: f64 = es.values.iter().sum();
        prop_assert!((sum - h.trace()).abs() <= 1e-12 * (1.0 + h.max_norm()));
    }

    #[test]
    fn eigenpairs_orthonormal_with_small_residual(
        u in -50.0..50.0f64, a in 0.0..10.0f64, bx in -3.0..3.0f64, by in -3.0..3.0f64,
    ) {
        let h = build_hamiltonian(&params(u, a, 10.0, 10.0), &FieldVector::new(bx, by, 0.0)).unwrap();
        let es = eigensystem(&h).unwrap();
        let scale = h.max_norm().max(1.0);
        for i in 0..4 {
            let hv = h.mul_vec(&es.vectors[i]);
            for r in 0..4 {
                prop_assert!((hv[r] - es.values[i] * es.vectors[i][r]).abs() < 1e-12 * scale);
            }
            for j in 0..4 {
                let dot: f64 = (0..4).map(|r| es.vectors[i][r] * es.vectors[j][r]).sum();
                let want = if i == j { 1.0 } else { 0.0 };
                prop_assert!((dot - want).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn closed_form_matches_jacobi(u in -50.0..50.0f64, a in 0.0..10.0f64) {
        let p = params(u, a, 1.0, 1.0);
        let exact = closed_form_zero_field(&p);
        let num = spectrum(&p, FieldVector::ZERO);
        let scale = exact.values.iter().fold(1.0f64, |m, v| m.max(v.abs()));
        // levels closer than this are not separable in double precision at the
        // 1e-8 projector level, so they are compared as one cluster
        let cluster = 1e-6 * scale;
        for k in 0..4 {
            prop_assert!((exact.values[k] - num.values[k]).abs() <= 1e-10 * exact.values[k].abs().max(1.0));
            let (pe, pn) = (exact.cluster_projector(k, cluster), num.cluster_projector(k, cluster));
            for r in 0..4 {
                for c in 0..4 {
                    prop_assert!((pe[r][c] - pn[r][c]).abs() < 1e-8);
                }
            }
        }
    }

    // A = 0 leaves |1> and |1bar> degenerate, and any mixture of them is an
    // eigenstate. Numeric eigenvectors are only as good as ε‖H‖/gap, so the
    // solver is held to the bound where levels are resolvable.
    #[test]
    fn zero_field_states_carry_no_moment(u in -50.0..50.0f64, a in 1e-3..10.0f64, mx in 0.1..20.0f64, my in 0.1..20.0f64) {
        let p = params(u, a, mx, my);
        let exact = closed_form_zero_field(&p);
        for k in 0..4 {
            prop_assert!(moment_expectation(&exact.state(k), &p).unwrap().magnitude() < 1e-10);
        }
        let num = spectrum(&p, FieldVector::ZERO);
        let scale = u.abs().max(a).max(1.0);
        let gaps = num.values.windows(2).map(|w| w[1] - w[0]).filter(|g| *g > 1e-9 * scale);
        if gaps.fold(f64::INFINITY, f64::min) >= 1e-2 * scale {
            for k in 0..4 {
                prop_assert!(moment_expectation(&num.state(k), &p).unwrap().magnitude() < 1e-10);
            }
        }
    }

    #[test]
    fn moment_is_minus_field_derivative(
        u in 1.0..30.0f64, a in 0.1..5.0f64, mx in 1.0..15.0f64, my in 1.0..15.0f64,
        bx in -2.0..2.0f64, by in -2.0..2.0f64,
    ) {
        let p = params(u, a, mx, my);
        let es = spectrum(&p, FieldVector::new(bx, by, 0.0));
        // away from crossings: every gap exceeds the Zeeman shift over 0.05 T
        prop_assume!(min_gap(&es) > 2.0 * my * MU_B_OVER_K_B * 0.05);
        let h = 1e-5;
        let up = spectrum(&p, FieldVector::new(bx, by + h, 0.0));
        let dn = spectrum(&p, FieldVector::new(bx, by - h, 0.0));
        for k in 0..4 {
            let m = moment_expectation(&es.state(k), &p).unwrap();
            let fd = -(up.values[k] - dn.values[k]) / (2.0 * h) / MU_B_OVER_K_B;
            // roundoff in the difference scales with ‖H‖, so near-zero moments get an absolute floor
            let denom = m.my.abs().max(2e-3 * mx.max(my));
            prop_assert!((fd - m.my).abs() / denom < 1e-6, "state {k}: fd {fd} vs {}", m.my);
        }
    }

    #[test]
    fn field_along_y_keeps_a_zero_level(u in 0.5..50.0f64, a in 0.01..10.0f64, ratio in 0.0..3.0f64) {
        let p = params(u, a, 10.0, 10.0);
        let es = spectrum(&p, FieldVector::along_y(ratio * zeeman_threshold(&p)));
        prop_assert!(es.values[1].abs() < 1e-10 * u.max(1.0));
    }

    #[test]
    fn weak_tunneling_splitting(ua in 100.0..1000.0f64, a in 0.01..5.0f64) {
        let u = ua * a;
        let d = ground_splitting(&params(u, a, 1.0, 1.0));
        prop_assert!((d - 4.0 * a * a / u).abs() / d < 0.01);
    }

    #[test]
    fn exact_extraction_inverts_splitting(u in 0.0..1000.0f64, a in 1e-3..10.0f64) {
        let d = ground_splitting(&params(u, a, 1.0, 1.0));
        let back = extract_a(d, u, ExtractionMode::Exact).unwrap();
        prop_assert!((back - a).abs() / a < 1e-10);
    }

    #[test]
    fn large_u_rule_of_thumb_underestimates_by_u_over_a(ua in 100.0..1000.0f64, a in 0.01..5.0f64) {
        let u = ua * a;
        let d = ground_splitting(&params(u, a, 1.0, 1.0));
        let exact = extract_a(d, u, ExtractionMode::Exact).unwrap();
        let rough = extract_a(d, u, ExtractionMode::Paper).unwrap();
        prop_assert!(((exact / rough) / ua - 1.0).abs() < 0.01);
    }

    #[test]
    fn zeeman_threshold_scaling(u in 0.1..100.0f64, mu in 0.1..20.0f64, k in 0.1..10.0f64) {
        let b = zeeman_threshold_for(u, mu).unwrap();
        prop_assert!((zeeman_threshold_for(k * u, mu).unwrap() - k * b).abs() <= 1e-12 * k * b);
        prop_assert!((zeeman_threshold_for(u, k * mu).unwrap() - b / k).abs() <= 1e-12 * b / k);
    }

    #[test]
    fn evolution_is_unitary_and_reversible(
        u in -20.0..20.0f64, a in 0.0..5.0f64, bx in -1.0..1.0f64, by in -1.0..1.0f64,
        re in prop::array::uniform4(-1.0..1.0f64), t in 0.0..2.0f64,
    ) {
        prop_assume!(re.iter().map(|x| x * x).sum::<f64>() > 1e-3);
        let h = build_hamiltonian(&params(u, a, 10.0, 10.0), &FieldVector::new(bx, by, 0.0)).unwrap();
        let psi = StateVector::from_real(re).normalized().unwrap();
        let fwd = evolve(&psi, &h, t).unwrap();
        prop_assert!((fwd.norm() - 1.0).abs() < 1e-12);
        let back = evolve(&fwd, &h, -t).unwrap();
        for k in 0..4 {
            prop_assert!((back.amplitudes[k] - psi.amplitudes[k]).norm() < 1e-10);
        }
    }

    #[test]
    fn lifetime_falls_with_temperature_and_beats_every_channel(
        tau in prop::collection::vec(1e-8..1e3f64, 1..=4),
        delta in prop::collection::vec(0.0..50.0f64, 4),
        t1 in 0.1..100.0f64, dt in 0.0..100.0f64,
    ) {
        let procs: Vec<_> = tau.iter().zip(&delta).map(|(&t0, &d)| ArrheniusProcess::new(t0, d).unwrap()).collect();
        let m = RelaxationModel::new(procs.clone()).unwrap();
        let (lo, hi) = (model_lifetime(&m, t1).unwrap(), model_lifetime(&m, t1 + dt).unwrap());
        prop_assert!(hi <= lo * (1.0 + 1e-12));
        let fastest = procs.iter().map(|p| p.lifetime(t1)).fold(f64::INFINITY, f64::min);
        prop_assert!(lo <= fastest * (1.0 + 1e-12));
    }
}

#[test]
fn ua_sweep_is_continuous() {
    let t = sweep_ua(0.0, 20.0, 201).unwrap();
    let step = 0.1;
    for w in t.eigenvalue_rows.windows(2) {
        for k in 0..4 {
            // |dλ/d(U/A)| ≤ 1 for every level
            assert!((w[1][k] - w[0][k]).abs() <= step * (1.0 + 1e-12));
        }
    }
}

#[test]
fn field_sweep_is_continuous() {
    let p = params(10.0, 1.0, 10.0, 10.0);
    let n = 401;
    let t = sweep_field(&p, 2.0, n).unwrap();
    let db = 2.0 / (n - 1) as f64 * zeeman_threshold(&p);
    let bound = 2.0 * (2.0 * p.mu_y() * MU_B_OVER_K_B * db);
    for w in t.eigenvalue_rows.windows(2) {
        for k in 0..4 {
            assert!((w[1][k] - w[0][k]).abs() <= bound);
        }
    }
}

#[test]
fn stationary_states_only_pick_up_phase() {
    let p = params(10.0, 1.0, 10.0, 10.0);
    let h = build_hamiltonian(&p, &FieldVector::new(0.2, 0.4, 0.0)).unwrap();
    let es = eigensystem(&h).unwrap();
    for k in 0..4 {
        let s = es.state(k);
        let later = evolve(&s, &h, 0.37).unwrap();
        assert!((s.inner(&later).norm() - 1.0).abs() < 1e-12);
    }
    let one = StateVector::basis(BasisState::One);
    let same = evolve(&one, &h, 0.0).unwrap();
    assert!((0..4).all(|k| (same.amplitudes[k] - one.amplitudes[k]).norm() < 1e-14));
}
