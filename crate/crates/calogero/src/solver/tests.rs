use super::*;
use crate::liealg::{build_model, Automorphism, Family, RealForm};
use crate::models::{folded_model, principal_model, principal_rational_model, FoldedSeries};
use crate::rmatrix::eval_r;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha12Rng;
use std::sync::Arc;

fn sl2_trig() -> RMatrixSpec {
    let built = build_model(Family::A, 1, RealForm::Split).unwrap();
    let theta = Arc::new(Automorphism::identity(&built.model));
    RMatrixSpec::trigonometric(built.model, built.cartan_split, theta).unwrap()
}

fn constrained_state(spec: &RMatrixSpec, seed: u64, spin_scale: f64) -> PhaseState {
    let mut rng = ChaCha12Rng::seed_from_u64(seed);
    let q = crate::rmatrix::sample_regular_q_with_margin(spec, &mut rng, 1.2, 0.5);
    let p = CoeffVec::from_fn(spec.rank(), |_, _| rng.gen_range(-0.15..0.15));
    let xi_raw = CoeffVec::from_fn(spec.model.dim, |_, _| {
        rng.gen_range(-spin_scale..spin_scale)
    });
    let xi = spec.split.project(&xi_raw).1;
    PhaseState::new(q, p, xi)
}

#[test]
fn polar_factorize_identity_case() {
    let spec = sl2_trig();
    let q0 = CoeffVec::from_vec(vec![0.8]);
    let g = expm(&spec.model.realize(&spec.q_full(&q0)));
    let fac = polar_factorize(&spec, &g, &q0, &CoeffVec::zeros(2)).unwrap();
    assert!(fac.iterations <= 1);
    assert!((fac.q - &q0).norm() < 1e-12);
    assert!(fac.eta.norm() < 1e-12);
}

#[test]
fn polar_factorize_recovers_forward_construction() {
    for entry in [
        principal_model(Family::A, 1, RealForm::Split).unwrap(),
        principal_model(Family::A, 1, RealForm::Compact).unwrap(),
        folded_model(FoldedSeries::AEven, 1, RealForm::Split).unwrap(),
    ] {
        let spec = &entry.spec;
        let model = &spec.model;
        let mut rng = ChaCha12Rng::seed_from_u64(71);
        for _ in 0..5 {
            let rank = spec.rank();
            let q = CoeffVec::from_fn(rank, |i, _| 0.8 - 0.1 * i as f64 + rng.gen_range(-0.1..0.1));
            let eta = CoeffVec::from_fn(spec.split.perp_dim(), |_, _| rng.gen_range(-0.15..0.15));
            let eta_mat = model.realize(&spec.split.from_perp_coords(&eta));
            let e_pos = expm(&eta_mat);
            let e_neg = expm(&(-&eta_mat));
            let q_mat = model.realize(&spec.q_full(&q));
            let g =
                spec.theta.action.apply_group_inv(&e_pos).unwrap() * expm(&q_mat) * e_neg;
            // cold-ish start: zero eta, approximate q
            let fac = polar_factorize(spec, &g, &q, &CoeffVec::zeros(spec.split.perp_dim()))
                .unwrap_or_else(|e| panic!("{}: {e}", entry.name));
            assert!(
                (fac.q - &q).norm() < 1e-10 && (fac.eta - &eta).norm() < 1e-10,
                "{}: factorization drifted",
                entry.name
            );
        }
    }
}

#[test]
fn polar_factorize_reports_divergence_far_from_identity() {
    let spec = sl2_trig();
    let model = &spec.model;
    let mut rng = ChaCha12Rng::seed_from_u64(73);
    let q = CoeffVec::from_vec(vec![0.9]);
    let eta = CoeffVec::from_fn(2, |_, _| rng.gen_range(-0.2..0.2)) * 100.0;
    let eta_mat = model.realize(&spec.split.from_perp_coords(&eta));
    let g = expm(&eta_mat) * expm(&model.realize(&spec.q_full(&q))) * expm(&(-&eta_mat));
    let res = polar_factorize(&spec, &g, &q, &CoeffVec::zeros(2));
    assert!(res.is_err(), "expected a divergence error, got {res:?}");
}

#[test]
fn geodesic_free_motion_is_exact() {
    let spec = sl2_trig();
    let state0 = PhaseState::new(
        CoeffVec::from_vec(vec![0.7]),
        CoeffVec::from_vec(vec![0.3]),
        spec.model.zero(),
    );
    let times = uniform_grid(0.0, 1.0, 11);
    let record = solve_geodesic_group(&spec, &state0, &times).unwrap();
    assert!(record.truncated.is_none());
    for (j, t) in times.iter().enumerate() {
        let expect_q = 0.7 + t * 0.3;
        assert!((record.states[j].q[0] - expect_q).abs() < 1e-12);
        assert!(record.states[j].xi.norm() < 1e-12);
    }
}

#[test]
fn geodesic_conserves_h_and_spectrum() {
    for entry in [
        principal_model(Family::A, 1, RealForm::Split).unwrap(),
        principal_model(Family::A, 2, RealForm::Compact).unwrap(),
        folded_model(FoldedSeries::AOdd, 2, RealForm::Split).unwrap(),
    ] {
        let spec = &entry.spec;
        let state0 = constrained_state(spec, 79, 0.4);
        let times = uniform_grid(0.0, 1.0, 21);
        let record = solve_geodesic_group(spec, &state0, &times)
            .unwrap_or_else(|e| panic!("{}: {e}", entry.name));
        assert!(record.truncated.is_none(), "{} truncated", entry.name);
        let drift = invariant_drift(spec, &record);
        assert!(
            drift.h_drift < 1e-10,
            "{}: H drift {:.2e}",
            entry.name,
            drift.h_drift
        );
        assert!(
            drift.eig_drift < 1e-9,
            "{}: eigenvalue drift {:.2e}",
            entry.name,
            drift.eig_drift
        );
        assert!(drift.casimir_drift < 1e-10, "{}: Casimir drift", entry.name);
    }
}

#[test]
fn geodesic_group_rejects_rational() {
    let entry = principal_rational_model(Family::A, 1, RealForm::Split).unwrap();
    let state0 = constrained_state(&entry.spec, 83, 0.4);
    let res = solve_geodesic_group(&entry.spec, &state0, &uniform_grid(0.0, 1.0, 3));
    assert!(matches!(res, Err(crate::Error::Unsupported(_))));
}

#[test]
fn algebra_solver_free_motion_and_spectrum() {
    let entry = principal_rational_model(Family::A, 1, RealForm::Split).unwrap();
    let spec = &entry.spec;
    let state0 = PhaseState::new(
        CoeffVec::from_vec(vec![0.7]),
        CoeffVec::from_vec(vec![0.25]),
        spec.model.zero(),
    );
    let times = uniform_grid(0.0, 1.0, 11);
    let record = solve_geodesic_algebra(spec, &state0, &times).unwrap();
    for (j, t) in times.iter().enumerate() {
        assert!((record.states[j].q[0] - (0.7 + 0.25 * t)).abs() < 1e-12);
    }
    // with spin: spectrum of X(t) equals spectrum of realize(q(t))
    let state0 = constrained_state(spec, 89, 0.4);
    let record = solve_geodesic_algebra(spec, &state0, &times).unwrap();
    assert!(record.truncated.is_none());
    let l0 = crate::dynamics::lax(spec, &state0).unwrap();
    let x0 = spec.model.realize(&spec.q_full(&state0.q));
    let v = spec.model.realize(&l0.coeffs);
    for (j, t) in times.iter().enumerate() {
        let x_t = &x0 + &v * crate::C64::new(*t, 0.0);
        let ex = crate::linalg::eigenvalues(&x_t).unwrap();
        let q_mat = spec.model.realize(&spec.q_full(&record.states[j].q));
        let eq = crate::linalg::eigenvalues(&q_mat).unwrap();
        assert!(spectrum_deviation(&ex, &eq) < 1e-10);
    }
}

#[test]
fn rk4_free_motion_and_constraint_preservation() {
    let spec = sl2_trig();
    let state0 = PhaseState::new(
        CoeffVec::from_vec(vec![0.7]),
        CoeffVec::from_vec(vec![0.3]),
        spec.model.zero(),
    );
    let times = uniform_grid(0.0, 1.0, 11);
    let record = integrate_rk4(&spec, &state0, &times, 1e-3).unwrap();
    assert!((record.states[10].q[0] - 1.0).abs() < 1e-12);

    let state0 = constrained_state(&spec, 91, 0.5);
    let record = integrate_rk4(&spec, &state0, &times, 1e-3).unwrap();
    let drift = invariant_drift(&spec, &record);
    assert!(drift.xi_k_max < 1e-9, "xi_K drift {:.2e}", drift.xi_k_max);
    assert!(drift.h_drift < 1e-8, "H drift {:.2e}", drift.h_drift);
    assert!(drift.casimir_drift < 1e-8);
    assert!(drift.higher_casimir_drift < 1e-8, "tr(xi^3) drift");
}

#[test]
fn rk4_is_fourth_order_in_h_drift() {
    // a strongly coupled state so the energy drift is far above roundoff
    let spec = sl2_trig();
    let mut rng = ChaCha12Rng::seed_from_u64(97);
    let q = crate::rmatrix::sample_regular_q_with_margin(&spec, &mut rng, 0.6, 0.25);
    let p = CoeffVec::from_fn(1, |_, _| rng.gen_range(-0.3..0.3));
    let xi_raw = CoeffVec::from_fn(spec.model.dim, |_, _| rng.gen_range(-2.5..2.5));
    let state0 = PhaseState::new(q, p, spec.split.project(&xi_raw).1);
    let times = uniform_grid(0.0, 1.0, 11);
    let coarse = integrate_rk4(&spec, &state0, &times, 4e-3).unwrap();
    let fine = integrate_rk4(&spec, &state0, &times, 2e-3).unwrap();
    let d_coarse = invariant_drift(&spec, &coarse).h_drift;
    let d_fine = invariant_drift(&spec, &fine).h_drift;
    let ratio = d_coarse / d_fine;
    assert!(
        ratio > 8.0 && ratio < 40.0,
        "expected ~16x drift reduction, got {ratio:.1} ({d_coarse:.2e} -> {d_fine:.2e})"
    );
}

#[test]
fn compare_runs_self_is_zero() {
    let spec = sl2_trig();
    let state0 = constrained_state(&spec, 101, 0.5);
    let times = uniform_grid(0.0, 0.5, 6);
    let record = solve_geodesic_group(&spec, &state0, &times).unwrap();
    let report = compare_runs(&record, &record, 1e-6).unwrap();
    assert!(report.pass);
    assert_eq!(report.max_h_dev, 0.0);
    assert_eq!(report.max_eig_dev, 0.0);
    assert_eq!(report.max_xi_dev, 0.0);
}

#[test]
fn cross_solver_agreement_sl2() {
    let spec = sl2_trig();
    let state0 = constrained_state(&spec, 103, 0.6);
    let times = uniform_grid(0.0, 1.0, 101);
    let geo = solve_geodesic_group(&spec, &state0, &times).unwrap();
    let rk = integrate_rk4(&spec, &state0, &times, 1e-3).unwrap();
    let report = compare_runs(&geo, &rk, 1e-6).unwrap();
    assert!(
        report.pass,
        "cross-solver deviations: H {:.2e}, eig {:.2e}",
        report.max_h_dev, report.max_eig_dev
    );
}

#[test]
fn cross_solver_rational_sl2() {
    let entry = principal_rational_model(Family::A, 1, RealForm::Split).unwrap();
    let spec = &entry.spec;
    let state0 = constrained_state(spec, 107, 0.5);
    let times = uniform_grid(0.0, 1.0, 101);
    let geo = solve_geodesic_algebra(spec, &state0, &times).unwrap();
    let rk = integrate_rk4(spec, &state0, &times, 1e-3).unwrap();
    let report = compare_runs(&geo, &rk, 1e-6).unwrap();
    assert!(
        report.pass,
        "rational cross-solver deviations: H {:.2e}, eig {:.2e}",
        report.max_h_dev, report.max_eig_dev
    );
}

#[test]
fn compare_runs_rejects_mismatched_grids() {
    let spec = sl2_trig();
    let state0 = constrained_state(&spec, 109, 0.4);
    let a = solve_geodesic_group(&spec, &state0, &uniform_grid(0.0, 0.5, 6)).unwrap();
    let b = solve_geodesic_group(&spec, &state0, &uniform_grid(0.0, 0.7, 6)).unwrap();
    assert!(matches!(
        compare_runs(&a, &b, 1e-6),
        Err(crate::Error::GridMismatch(_))
    ));
}

#[test]
fn geodesic_vs_spin_lax_equation_differ_by_gauge() {
    // the geodesic evolution of L and the spin Calogero Lax equation differ
    // by an infinitesimal gauge transformation: dL/dt - [R L, L] lies in
    // the span of [L, kappa] for kappa in K
    let entry = folded_model(FoldedSeries::AEven, 1, RealForm::Split).unwrap();
    let spec = &entry.spec;
    let state0 = constrained_state(spec, 113, 0.6);
    let h = 4e-5;
    let t0 = 0.3;
    let times = [t0 - h, t0, t0 + h];
    let record = solve_geodesic_group(spec, &state0, &times).unwrap();
    assert!(record.truncated.is_none());
    let l_at = |j: usize| {
        crate::dynamics::lax(spec, &record.states[j])
            .unwrap()
            .coeffs
    };
    let l_dot = (l_at(2) - l_at(0)) / (2.0 * h);
    let state = &record.states[1];
    let l = l_at(1);
    let r = eval_r(spec, &state.q).unwrap().matrix;
    let lax_rhs = spec.model.bracket(&(&r * &l), &l);
    let diff = l_dot - lax_rhs;
    // project off span{ [L, kappa_i] }
    let rank = spec.rank();
    let mut basis = OpMatrix::zeros(spec.model.dim, rank);
    for i in 0..rank {
        let col = spec.model.bracket(&l, &spec.split.k_basis[i]);
        basis.set_column(i, &col);
    }
    let svd = basis.clone().svd(true, true);
    let coeffs = svd.solve(&diff, 1e-13).unwrap();
    let residual = (&basis * coeffs - &diff).norm();
    assert!(
        residual < 1e-9,
        "gauge-orthogonal component {residual:.2e} (|diff| = {:.2e})",
        diff.norm()
    );
}

#[test]
fn cross_solver_agreement_cyclic() {
    // exercises the block-shift group lift in the polar factorization
    let entry = crate::models::cyclic_model(Family::A, 1, RealForm::Split, 2, None).unwrap();
    let spec = &entry.spec;
    let state0 = constrained_state(spec, 131, 0.5);
    let times = uniform_grid(0.0, 1.0, 51);
    let geo = solve_geodesic_group(spec, &state0, &times).unwrap();
    assert!(geo.truncated.is_none(), "{:?}", geo.truncated);
    let rk = integrate_rk4(spec, &state0, &times, 1e-3).unwrap();
    let report = compare_runs(&geo, &rk, 1e-6).unwrap();
    assert!(
        report.pass,
        "cyclic cross-solver deviations: H {:.2e}, eig {:.2e}",
        report.max_h_dev, report.max_eig_dev
    );
}

#[test]
fn cross_solver_rational_compact() {
    let entry = principal_rational_model(Family::A, 1, RealForm::Compact).unwrap();
    let spec = &entry.spec;
    let state0 = constrained_state(spec, 137, 0.5);
    let times = uniform_grid(0.0, 1.0, 51);
    let geo = solve_geodesic_algebra(spec, &state0, &times).unwrap();
    assert!(geo.truncated.is_none());
    let rk = integrate_rk4(spec, &state0, &times, 1e-3).unwrap();
    let report = compare_runs(&geo, &rk, 1e-6).unwrap();
    assert!(report.pass, "H dev {:.2e}", report.max_h_dev);
}

#[test]
fn geodesic_folded_compact_d_family() {
    // D3 compact folded: conjugation-type group lift with K = i H^+
    let entry = folded_model(FoldedSeries::D, 2, RealForm::Compact).unwrap();
    let spec = &entry.spec;
    let state0 = constrained_state(spec, 139, 0.4);
    let times = uniform_grid(0.0, 0.5, 11);
    let record = solve_geodesic_group(spec, &state0, &times).unwrap();
    assert!(record.truncated.is_none(), "{:?}", record.truncated);
    let drift = invariant_drift(spec, &record);
    assert!(drift.h_drift < 1e-10, "H drift {:.2e}", drift.h_drift);
    assert!(drift.eig_drift < 1e-9);
}

#[test]
fn cross_solver_agreement_cyclic_three_copies() {
    // N = 3 makes the twist non-involutive, so the factorization's
    // Theta^{-1} orientation actually matters here
    let entry = crate::models::cyclic_model(Family::A, 1, RealForm::Split, 3, None).unwrap();
    let spec = &entry.spec;
    let state0 = constrained_state(spec, 149, 0.5);
    let times = uniform_grid(0.0, 0.5, 26);
    let geo = solve_geodesic_group(spec, &state0, &times).unwrap();
    assert!(geo.truncated.is_none(), "{:?}", geo.truncated);
    let rk = integrate_rk4(spec, &state0, &times, 1e-3).unwrap();
    let report = compare_runs(&geo, &rk, 1e-6).unwrap();
    assert!(
        report.pass,
        "3-cycle deviations: H {:.2e}, eig {:.2e}",
        report.max_h_dev, report.max_eig_dev
    );
}
