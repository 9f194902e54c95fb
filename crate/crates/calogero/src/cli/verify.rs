//! Verification batteries over the model catalogue: the r-matrix identities,
//! the quasi-Lax dynamics checks, and the folding golden data. Shared
//! between the `verify` subcommand and the acceptance suite.

use crate::dynamics::{
    anomaly_residual_scaled, eom_rhs, hamiltonian, lax, momentum_constraint_check,
    momentum_gauge_slice, random_elem, random_state,
};
use crate::error::Result;
use crate::liealg::{inner_exp_automorphism, AutKind, Family, RealForm};
use crate::models::{cyclic_model, folded_model, principal_model, FoldedSeries, ModelCatalogEntry};
use crate::rmatrix::{
    cayley, cdybe_residual, eval_r, eval_r_plus, nabla_r, sample_regular_q, RMatrixSpec,
};
use crate::CoeffVec;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha12Rng;
use rayon::prelude::*;
use serde::Serialize;

/// One verification check: the measured worst residual against its
/// tolerance. For detector-sanity checks (`must_exceed`) the measurement
/// has to stay *above* the threshold.
#[derive(Debug, Clone, Serialize)]
pub struct CheckResult {
    pub suite: String,
    pub name: String,
    pub model: String,
    pub samples: usize,
    pub residual: f64,
    pub tolerance: f64,
    pub must_exceed: bool,
    pub pass: bool,
}

impl CheckResult {
    fn below(
        suite: &str,
        name: &str,
        model: &str,
        samples: usize,
        residual: f64,
        tol: f64,
    ) -> Self {
        CheckResult {
            suite: suite.into(),
            name: name.into(),
            model: model.into(),
            samples,
            residual,
            tolerance: tol,
            must_exceed: false,
            pass: residual < tol,
        }
    }

    fn above(
        suite: &str,
        name: &str,
        model: &str,
        samples: usize,
        residual: f64,
        tol: f64,
    ) -> Self {
        CheckResult {
            suite: suite.into(),
            name: name.into(),
            model: model.into(),
            samples,
            residual,
            tolerance: tol,
            must_exceed: true,
            pass: residual > tol,
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct VerifyReport {
    pub suite: String,
    pub seed: u64,
    pub samples: usize,
    pub corrupt_r: bool,
    pub checks: Vec<CheckResult>,
    pub all_pass: bool,
}

/// The catalogue the acceptance criteria quantify over: principal
/// split/compact A1-A3 and D4, folded A2/A3/D3, and cyclic N=2,3 over sl2.
pub fn acceptance_catalogue() -> Result<Vec<ModelCatalogEntry>> {
    let mut entries = Vec::new();
    for (family, rank) in [
        (Family::A, 1),
        (Family::A, 2),
        (Family::A, 3),
        (Family::D, 4),
    ] {
        for form in [RealForm::Split, RealForm::Compact] {
            entries.push(principal_model(family, rank, form)?);
        }
    }
    for (series, n) in [
        (FoldedSeries::AEven, 1), // A2
        (FoldedSeries::AOdd, 2),  // A3
        (FoldedSeries::D, 2),     // D3
    ] {
        for form in [RealForm::Split, RealForm::Compact] {
            entries.push(folded_model(series, n, form)?);
        }
    }
    for copies in [2, 3] {
        entries.push(cyclic_model(Family::A, 1, RealForm::Split, copies, None)?);
    }
    Ok(entries)
}

/// r-matrix identity battery for one spec.
pub fn rmatrix_checks(
    entry: &ModelCatalogEntry,
    seed: u64,
    samples: usize,
) -> Result<Vec<CheckResult>> {
    let spec = &entry.spec;
    let model = &spec.model;
    let name = entry.name.as_str();
    let mut rng = ChaCha12Rng::seed_from_u64(seed);
    let points: Vec<CoeffVec> = (0..samples)
        .map(|_| sample_regular_q(spec, &mut rng, 1.2))
        .collect();
    let pairs: Vec<(CoeffVec, CoeffVec)> = (0..samples)
        .map(|_| {
            (
                random_elem(model, &mut rng, 1.0),
                random_elem(model, &mut rng, 1.0),
            )
        })
        .collect();

    let mut checks = Vec::new();

    // antisymmetry and K-compatibility
    let anti: f64 = points
        .par_iter()
        .map(|q| {
            let r = eval_r(spec, q).unwrap().matrix;
            let a = (r.transpose() * &model.gram + &model.gram * &r).norm();
            let k_out = (&spec.split.p_k * &r).norm();
            let k_in = (&r * &spec.split.b_k).norm();
            a.max(k_out).max(k_in)
        })
        .reduce(|| 0.0, f64::max);
    checks.push(CheckResult::below(
        "rmatrix",
        "antisymmetry-and-k-compatibility",
        name,
        points.len(),
        anti,
        1e-12,
    ));

    // equivariance [ad_kappa, R] = 0
    let equiv: f64 = points
        .par_iter()
        .map(|q| {
            let r = eval_r(spec, q).unwrap().matrix;
            spec.split
                .k_basis
                .iter()
                .map(|kappa| {
                    let ad_k = model.ad_op(kappa);
                    (&ad_k * &r - &r * &ad_k).norm()
                })
                .fold(0.0, f64::max)
        })
        .reduce(|| 0.0, f64::max);
    checks.push(CheckResult::below(
        "rmatrix",
        "equivariance",
        name,
        points.len(),
        equiv,
        1e-12,
    ));

    // CDYBE residual
    let cdybe: f64 = points
        .par_iter()
        .zip(pairs.par_iter())
        .map(|(q, (x, y))| cdybe_residual(spec, q, x, y).unwrap().norm())
        .reduce(|| 0.0, f64::max);
    checks.push(CheckResult::below(
        "rmatrix",
        "cdybe-residual",
        name,
        points.len(),
        cdybe,
        1e-8,
    ));

    // Cayley identity
    let n_cayley = samples.min(50);
    let (k_res, p_res) = points[..n_cayley]
        .par_iter()
        .map(|q| {
            let (_, report) = cayley(spec, q).unwrap();
            (report.k_block_residual, report.perp_block_residual)
        })
        .reduce(|| (0.0, 0.0), |a, b| (a.0.max(b.0), a.1.max(b.1)));
    checks.push(CheckResult::below(
        "rmatrix",
        "cayley-k-block",
        name,
        n_cayley,
        k_res,
        1e-12,
    ));
    checks.push(CheckResult::below(
        "rmatrix",
        "cayley-perp-block",
        name,
        n_cayley,
        p_res,
        1e-11,
    ));

    // compact shift property (principal compact specs only); both q and
    // q + v must sit well inside the regular set or the restricted inverse
    // amplifies roundoff past the tolerance
    if model.form == RealForm::Compact && spec.theta.kind == AutKind::Trivial {
        let mut worst = 0.0_f64;
        let mut done = 0;
        while done < samples.min(10) {
            let q = crate::rmatrix::sample_regular_q_with_margin(spec, &mut rng, 1.0, 0.25);
            let v = CoeffVec::from_fn(spec.rank(), |_, _| rng.gen_range(-0.3..0.3));
            let shifted_point = match eval_r(spec, &(&q + &v)) {
                Ok(op) if op.sigma_min > 0.25 => op,
                _ => continue,
            };
            let v_full = spec.split.from_k_coords(&v);
            let theta_v = std::sync::Arc::new(inner_exp_automorphism(model, &v_full)?);
            let shifted_spec =
                RMatrixSpec::trigonometric(spec.model.clone(), spec.split.clone(), theta_v)?;
            let rhs = eval_r(&shifted_spec, &q)?.matrix;
            worst = worst.max((shifted_point.matrix - rhs).norm());
            done += 1;
        }
        checks.push(CheckResult::below(
            "rmatrix",
            "compact-shift-property",
            name,
            done,
            worst,
            1e-11,
        ));
    }
    Ok(checks)
}

/// Dynamics battery for one spec: Hamiltonian identity, quasi-Lax anomaly,
/// Lax-equation consistency, constraint tangency and the momentum-map
/// equivalence.
pub fn dynamics_checks(
    entry: &ModelCatalogEntry,
    seed: u64,
    samples: usize,
    r_scale: f64,
) -> Result<Vec<CheckResult>> {
    let spec = &entry.spec;
    let model = &spec.model;
    let name = entry.name.as_str();
    let mut rng = ChaCha12Rng::seed_from_u64(seed ^ 0x9e3779b97f4a7c15);
    let mut checks = Vec::new();

    // H = <L,L>/2
    let mut h_dev = 0.0_f64;
    for k in 0..samples.min(50) {
        let state = random_state(spec, &mut rng, 1.0, k % 2 == 0);
        let h = hamiltonian(spec, &state)?;
        let l = lax(spec, &state)?;
        h_dev = h_dev.max((h - 0.5 * model.pairing(&l.coeffs, &l.coeffs)).abs());
    }
    checks.push(CheckResult::below(
        "dynamics",
        "hamiltonian-equals-half-lax-pairing",
        name,
        samples.min(50),
        h_dev,
        1e-12,
    ));

    // quasi-Lax anomaly on unconstrained states
    let states: Vec<_> = (0..samples.min(50))
        .map(|_| random_state(spec, &mut rng, 1.0, false))
        .collect();
    let anomaly: f64 = states
        .par_iter()
        .map(|state| {
            anomaly_residual_scaled(spec, state, r_scale)
                .unwrap()
                .amax()
        })
        .reduce(|| 0.0, f64::max);
    checks.push(CheckResult::below(
        "dynamics",
        "quasi-lax-anomaly",
        name,
        states.len(),
        anomaly,
        1e-6,
    ));
    if (r_scale - 1.0).abs() > 1e-15 {
        // corrupted run: the identity check above is expected to fail, and
        // the detector row asserts it failed loudly enough
        checks.push(CheckResult::above(
            "dynamics",
            "quasi-lax-anomaly-detector",
            name,
            states.len(),
            anomaly,
            1e-3,
        ));
    }

    // Lax equation from the chain rule + tangency on constrained states
    let mut lax_dev = 0.0_f64;
    let mut tangency = 0.0_f64;
    for _ in 0..samples.min(20) {
        let state = random_state(spec, &mut rng, 0.8, true);
        let rhs = eom_rhs(spec, &state)?;
        tangency = tangency.max(spec.split.project(&rhs.dxi).0.norm());
        let grad = nabla_r(spec, &state.q, &rhs.dq)?;
        let r_plus = eval_r_plus(spec, &state.q)?.matrix;
        let dl = spec.split.from_k_coords(&rhs.dp) - &grad * &state.xi - &r_plus * &rhs.dxi;
        let l = lax(spec, &state)?;
        let r = eval_r(spec, &state.q)?.matrix;
        let want = model.bracket(&(&r * &l.coeffs), &l.coeffs);
        lax_dev = lax_dev.max((dl - want).norm());
    }
    checks.push(CheckResult::below(
        "dynamics",
        "lax-equation-chain-rule",
        name,
        samples.min(20),
        lax_dev,
        1e-8,
    ));
    checks.push(CheckResult::below(
        "dynamics",
        "constraint-tangency",
        name,
        samples.min(20),
        tangency,
        1e-10,
    ));

    // momentum-map equivalence: gauge-slice triples solve both forms,
    // perturbed triples violate both
    let mut slice_res = 0.0_f64;
    let mut perturbed_min = f64::INFINITY;
    for _ in 0..samples.min(50) {
        let q = sample_regular_q(spec, &mut rng, 1.0);
        let xi_perp = spec.split.project(&random_elem(model, &mut rng, 1.0)).1;
        let jk = CoeffVec::from_fn(spec.rank(), |_, _| rng.gen_range(-1.0..1.0));
        let j = momentum_gauge_slice(spec, &q, &jk, &xi_perp)?;
        let (r1, r2) = momentum_constraint_check(spec, &q, &j, &xi_perp)?;
        slice_res = slice_res.max(r1).max(r2);
        let j_bad = &j + random_elem(model, &mut rng, 0.3);
        let (b1, b2) = momentum_constraint_check(spec, &q, &j_bad, &xi_perp)?;
        perturbed_min = perturbed_min.min(b1).min(b2);
    }
    checks.push(CheckResult::below(
        "dynamics",
        "momentum-map-gauge-slice",
        name,
        samples.min(50),
        slice_res,
        1e-10,
    ));
    checks.push(CheckResult::above(
        "dynamics",
        "momentum-map-detects-violation",
        name,
        samples.min(50),
        perturbed_min,
        1e-4,
    ));
    Ok(checks)
}

/// Expected folded root/weight sets (sorted integer vectors).
pub mod golden {
    /// `C_n`: `e_k +- e_l (k < l)` and `2 e_m`.
    pub fn c_n(n: usize) -> Vec<Vec<i32>> {
        let mut v = pair_roots(n);
        for m in 0..n {
            let mut r = vec![0; n];
            r[m] = 2;
            v.push(r);
        }
        v.sort();
        v
    }

    /// `B_n`: `e_k +- e_l (k < l)` and `e_m`.
    pub fn b_n(n: usize) -> Vec<Vec<i32>> {
        let mut v = pair_roots(n);
        for m in 0..n {
            let mut r = vec![0; n];
            r[m] = 1;
            v.push(r);
        }
        v.sort();
        v
    }

    /// `e_k +- e_l (k < l)` only.
    pub fn pair_roots(n: usize) -> Vec<Vec<i32>> {
        let mut v = Vec::new();
        for k in 0..n {
            for l in (k + 1)..n {
                for sign in [1, -1] {
                    let mut r = vec![0; n];
                    r[k] = 1;
                    r[l] = sign;
                    v.push(r);
                }
            }
        }
        v.sort();
        v
    }

    /// Weights of the `A_{2n}` folding: `e_k +- e_l`, `e_m`, `2 e_m`.
    pub fn gamma_a_even(n: usize) -> Vec<Vec<i32>> {
        let mut v = b_n(n);
        for m in 0..n {
            let mut r = vec![0; n];
            r[m] = 2;
            v.push(r);
        }
        v.sort();
        v
    }

    /// Weights of the `D_{n+1}` folding: `e_m`.
    pub fn gamma_d(n: usize) -> Vec<Vec<i32>> {
        let mut v: Vec<Vec<i32>> = (0..n)
            .map(|m| {
                let mut r = vec![0; n];
                r[m] = 1;
                r
            })
            .collect();
        v.sort();
        v
    }
}

/// Folding golden-data battery over the families of the acceptance range:
/// `A_{2n-1}` (n = 2, 3), `A_{2n}` (n = 1..3), `D_{n+1}` (n = 2..4).
pub fn folding_checks() -> Result<Vec<CheckResult>> {
    let mut checks = Vec::new();
    let mut run = |series: FoldedSeries, n: usize| -> Result<()> {
        let entry = folded_model(series, n, RealForm::Split)?;
        let folded = entry.folded.as_ref().unwrap();
        let (want_delta, want_gamma) = match series {
            FoldedSeries::AOdd => (golden::c_n(n), golden::pair_roots(n)),
            FoldedSeries::AEven => (golden::b_n(n), golden::gamma_a_even(n)),
            FoldedSeries::D => (golden::b_n(n), golden::gamma_d(n)),
        };
        let delta_ok = folded.delta_set() == want_delta;
        let gamma_ok = folded.gamma_set() == want_gamma;
        checks.push(CheckResult::below(
            "folding",
            "delta-plus-golden-set",
            &entry.name,
            want_delta.len(),
            if delta_ok { 0.0 } else { 1.0 },
            0.5,
        ));
        checks.push(CheckResult::below(
            "folding",
            "gamma-plus-golden-set",
            &entry.name,
            want_gamma.len(),
            if gamma_ok { 0.0 } else { 1.0 },
            0.5,
        ));
        // normalization and sigma-relations of the folded vectors
        let model = entry.model();
        let mut worst = 0.0_f64;
        for fv in folded.delta_plus.iter().chain(folded.gamma_plus.iter()) {
            let pair = model.pairing_mats(&fv.x_pos, &fv.x_neg);
            worst = worst.max((pair - crate::C64::new(1.0, 0.0)).norm());
            worst = worst.max((model.chevalley_sigma(&fv.x_pos) + &fv.x_neg).norm());
            // weight relation on the H^+ pattern basis
            for (k, h) in folded.h_plus.iter().enumerate() {
                let comm = h * &fv.x_pos - &fv.x_pos * h;
                let want = &fv.x_pos * crate::C64::new(fv.functional.0[k] as f64, 0.0);
                worst = worst.max((comm - want).norm());
            }
        }
        // c_phi constants
        for phi in folded.c_sign.keys() {
            let c = folded.c_sign[phi];
            worst = worst.max((c * c - 1.0).abs());
        }
        checks.push(CheckResult::below(
            "folding",
            "folded-vector-normalization",
            &entry.name,
            folded.delta_plus.len() + folded.gamma_plus.len(),
            worst,
            1e-12,
        ));
        Ok(())
    };
    for n in [2, 3] {
        run(FoldedSeries::AOdd, n)?;
    }
    for n in [1, 2, 3] {
        run(FoldedSeries::AEven, n)?;
    }
    for n in [2, 3, 4] {
        run(FoldedSeries::D, n)?;
    }
    Ok(checks)
}

/// Run a named suite.
pub fn run_verify(suite: &str, seed: u64, samples: usize, corrupt_r: bool) -> Result<VerifyReport> {
    let r_scale = if corrupt_r { 1.1 } else { 1.0 };
    let mut checks = Vec::new();
    match suite {
        "rmatrix" | "dynamics" | "all" => {
            let entries = acceptance_catalogue()?;
            for entry in &entries {
                if suite == "rmatrix" || suite == "all" {
                    checks.extend(rmatrix_checks(entry, seed, samples)?);
                }
                if suite == "dynamics" || suite == "all" {
                    checks.extend(dynamics_checks(entry, seed, samples, r_scale)?);
                }
            }
            if suite == "all" {
                checks.extend(folding_checks()?);
            }
        }
        "folding" => checks.extend(folding_checks()?),
        other => {
            return Err(crate::Error::Config(format!(
                "unknown suite {other:?}: expected rmatrix|dynamics|folding|all"
            )))
        }
    }
    let all_pass = checks.iter().all(|c| c.pass);
    Ok(VerifyReport {
        suite: suite.to_string(),
        seed,
        samples,
        corrupt_r,
        checks,
        all_pass,
    })
}
