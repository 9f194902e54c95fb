//! Two independent solution engines for the constrained dynamics: exact
//! projection of geodesic motion on the group (trigonometric) or on the
//! algebra (rational), and direct fixed-step RK4 integration of the
//! Hamilton equations, plus the gauge-invariant comparison harness.

use crate::dynamics::{
    eom_rhs, hamiltonian, lax, spectral_invariants, PhaseState, SpectralData, StateDerivative,
};
use crate::error::{Error, Result};
use crate::linalg::{expm, logm, spectrum_deviation};
use crate::rmatrix::{eval_r_plus, RKind, RMatrixSpec};
use crate::{CoeffVec, OpMatrix, Realization, C64};

/// Result of the generalized polar factorization
/// `g = Theta^{-1}(e^eta) e^q e^{-eta}`.
#[derive(Debug, Clone)]
pub struct FactorizationResult {
    /// K-coordinates of q.
    pub q: CoeffVec,
    /// K-perp coordinates of eta.
    pub eta: CoeffVec,
    pub iterations: usize,
    /// Final Newton residual `|| P_perp log(Theta^{-1}(e^{-eta}) g e^eta) ||`.
    pub residual: f64,
}

const NEWTON_TOL: f64 = 1e-12;
const NEWTON_MAX_ITER: usize = 50;

/// Solve `P_perp log(Theta^{-1}(e^{-eta}) g e^{eta}) = 0` for eta in K-perp
/// by a damped Newton iteration with finite-difference Jacobian, then read
/// off `q = P_K log(...)`.
pub fn polar_factorize(
    spec: &RMatrixSpec,
    g: &Realization,
    guess_q: &CoeffVec,
    guess_eta: &CoeffVec,
) -> Result<FactorizationResult> {
    newton_factorize(spec, g, guess_q, guess_eta, true)
}

/// Algebra-level analogue for the rational sector: solve
/// `P_perp (e^{-eta} X e^{eta}) = 0`, i.e. diagonalize X into K by a
/// K-perp conjugation.
pub fn algebra_factorize(
    spec: &RMatrixSpec,
    x: &Realization,
    guess_q: &CoeffVec,
    guess_eta: &CoeffVec,
) -> Result<FactorizationResult> {
    newton_factorize(spec, x, guess_q, guess_eta, false)
}

/// `q` is read off from the K-part of the logarithm once eta converges, so
/// only the eta guess steers the iteration; the q guess is accepted for
/// warm-start interface symmetry.
fn newton_factorize(
    spec: &RMatrixSpec,
    g: &Realization,
    _guess_q: &CoeffVec,
    guess_eta: &CoeffVec,
    group_level: bool,
) -> Result<FactorizationResult> {
    let model = &spec.model;
    let split = &spec.split;
    let d_perp = split.perp_dim();

    // the K-part of log(m) (or of m itself at the algebra level),
    // with the perp part as the Newton residual
    let parts = |eta: &CoeffVec| -> Result<(CoeffVec, CoeffVec)> {
        let eta_full = split.from_perp_coords(eta);
        let eta_mat = model.realize(&eta_full);
        let e_pos = expm(&eta_mat);
        let e_neg = expm(&(-eta_mat));
        let m = if group_level {
            let twisted = spec.theta.action.apply_group_inv(&e_neg)?;
            twisted * g * e_pos
        } else {
            e_neg * g * e_pos
        };
        let x = if group_level { logm(&m)? } else { m };
        let coeffs = model.expand(&x)?;
        Ok((split.k_coords(&coeffs), split.perp_coords(&coeffs)))
    };

    let mut eta = guess_eta.clone();
    let mut f = parts(&eta)?.1;
    let mut residual = f.norm();
    for iter in 0..NEWTON_MAX_ITER {
        if residual < NEWTON_TOL {
            let (q, _) = parts(&eta)?;
            validate_factorization(spec, g, &q, &eta, group_level)?;
            return Ok(FactorizationResult {
                q,
                eta,
                iterations: iter,
                residual,
            });
        }
        // finite-difference Jacobian of the residual map
        let h = 1e-6 * (1.0 + eta.norm());
        let mut jac = OpMatrix::zeros(d_perp, d_perp);
        for j in 0..d_perp {
            let mut ep = eta.clone();
            let mut em = eta.clone();
            ep[j] += h;
            em[j] -= h;
            let col = (parts(&ep)?.1 - parts(&em)?.1) / (2.0 * h);
            jac.set_column(j, &col);
        }
        let delta = jac.lu().solve(&(-&f)).ok_or(Error::NewtonDivergence {
            iters: iter,
            residual,
        })?;
        // backtracking keeps the iteration inside the branch domain
        let mut step = 1.0;
        let mut advanced = false;
        for _ in 0..8 {
            let candidate = &eta + &delta * step;
            match parts(&candidate) {
                Ok((_, fc)) if fc.norm() < residual || residual < 1e-10 => {
                    eta = candidate;
                    f = fc;
                    residual = f.norm();
                    advanced = true;
                    break;
                }
                _ => step *= 0.5,
            }
        }
        if !advanced {
            return Err(Error::NewtonDivergence {
                iters: iter,
                residual,
            });
        }
    }
    if residual < NEWTON_TOL {
        let (q, _) = parts(&eta)?;
        validate_factorization(spec, g, &q, &eta, group_level)?;
        return Ok(FactorizationResult {
            q,
            eta,
            iterations: NEWTON_MAX_ITER,
            residual,
        });
    }
    Err(Error::NewtonDivergence {
        iters: NEWTON_MAX_ITER,
        residual,
    })
}

/// Rebuild `Theta^{-1}(e^eta) e^q e^{-eta}` (or the algebra-level conjugate)
/// and compare with the input.
fn validate_factorization(
    spec: &RMatrixSpec,
    g: &Realization,
    q: &CoeffVec,
    eta: &CoeffVec,
    group_level: bool,
) -> Result<()> {
    let model = &spec.model;
    let eta_mat = model.realize(&spec.split.from_perp_coords(eta));
    let e_pos = expm(&eta_mat);
    let e_neg = expm(&(-eta_mat));
    let q_mat = model.realize(&spec.q_full(q));
    let recon = if group_level {
        // the normal form is g = Theta^{-1}(e^eta) e^q e^{-eta}
        spec.theta.action.apply_group_inv(&e_pos)? * expm(&q_mat) * &e_neg
    } else {
        &e_pos * q_mat * &e_neg
    };
    let dev = (recon - g).norm();
    if dev > 1e-10 * (1.0 + g.norm()) {
        return Err(Error::Construction(format!(
            "factorization validation failed (deviation {dev:.3e})"
        )));
    }
    Ok(())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SolverTag {
    GeodesicGroup,
    GeodesicAlgebra,
    Rk4,
}

impl SolverTag {
    pub fn as_str(&self) -> &'static str {
        match self {
            SolverTag::GeodesicGroup => "geodesic-group",
            SolverTag::GeodesicAlgebra => "geodesic-algebra",
            SolverTag::Rk4 => "rk4",
        }
    }
}

/// Gauge-invariant observables recorded per sample.
#[derive(Debug, Clone)]
pub struct InvariantSample {
    pub h: f64,
    pub spectral: SpectralData,
    /// `<xi, xi>` (quadratic Casimir of the spin).
    pub casimir2: f64,
}

#[derive(Debug, Clone)]
pub struct TruncationInfo {
    pub at_time: f64,
    pub reason: String,
}

/// A solved trajectory with per-sample gauge invariants.
#[derive(Debug, Clone)]
pub struct TrajectoryRecord {
    pub times: Vec<f64>,
    pub states: Vec<PhaseState>,
    pub invariants: Vec<InvariantSample>,
    pub newton_iters: Vec<usize>,
    pub solver: SolverTag,
    pub truncated: Option<TruncationInfo>,
    pub kmax: usize,
}

fn invariant_sample(
    spec: &RMatrixSpec,
    state: &PhaseState,
    kmax: usize,
) -> Result<InvariantSample> {
    let h = hamiltonian(spec, state)?;
    let l = lax(spec, state)?;
    let spectral = spectral_invariants(&spec.model, &l.coeffs, kmax);
    let casimir2 = spec.model.pairing(&state.xi, &state.xi);
    Ok(InvariantSample {
        h,
        spectral,
        casimir2,
    })
}

fn require_constrained(spec: &RMatrixSpec, state: &PhaseState) -> Result<()> {
    let n = state.xi_k_norm(spec);
    if n >= 1e-10 {
        return Err(Error::Precondition(format!(
            "initial state violates xi_K = 0 (norm {n:.3e})"
        )));
    }
    Ok(())
}

/// Exact solution by projection of the geodesic `g(t) = e^{q_0} e^{t L_0}`
/// on the group, for trigonometric specs.
pub fn solve_geodesic_group(
    spec: &RMatrixSpec,
    state0: &PhaseState,
    times: &[f64],
) -> Result<TrajectoryRecord> {
    if spec.kind != RKind::Trigonometric {
        return Err(Error::Unsupported(
            "group geodesic projection applies to the trigonometric family; \
             use the algebra projection for rational specs"
                .into(),
        ));
    }
    require_constrained(spec, state0)?;
    let model = &spec.model;
    let kmax = (spec.model.rank + 1).max(3);
    let l0 = lax(spec, state0)?;
    let l0_mat = model.realize(&l0.coeffs);
    let g0 = expm(&model.realize(&spec.q_full(&state0.q)));

    let mut record = TrajectoryRecord {
        times: Vec::new(),
        states: Vec::new(),
        invariants: Vec::new(),
        newton_iters: Vec::new(),
        solver: SolverTag::GeodesicGroup,
        truncated: None,
        kmax,
    };
    let mut warm_q = state0.q.clone();
    let mut warm_eta = CoeffVec::zeros(spec.split.perp_dim());
    let t0 = times.first().copied().unwrap_or(0.0);
    for &t in times {
        let g = &g0 * expm(&(&l0_mat * C64::new(t - t0, 0.0)));
        let step = (|| -> Result<(PhaseState, FactorizationResult)> {
            let fac = polar_factorize(spec, &g, &warm_q, &warm_eta)?;
            let state = recover_state(spec, &fac, &l0_mat, t)?;
            Ok((state, fac))
        })();
        match step {
            Ok((state, fac)) => {
                warm_q = fac.q.clone();
                warm_eta = fac.eta.clone();
                record.newton_iters.push(fac.iterations);
                record
                    .invariants
                    .push(invariant_sample(spec, &state, kmax)?);
                record.times.push(t);
                record.states.push(state);
            }
            Err(err) => {
                record.truncated = Some(TruncationInfo {
                    at_time: t,
                    reason: err.to_string(),
                });
                break;
            }
        }
    }
    Ok(record)
}

/// Recover the phase state from a factorization: `L(t) = e^{-eta} L0 e^{eta}`,
/// `p = P_K L`, `xi_perp = -(R_+|_perp)^{-1} P_perp L`.
fn recover_state(
    spec: &RMatrixSpec,
    fac: &FactorizationResult,
    l0_mat: &Realization,
    t: f64,
) -> Result<PhaseState> {
    let model = &spec.model;
    let split = &spec.split;
    let eta_mat = model.realize(&split.from_perp_coords(&fac.eta));
    let l_mat = expm(&(-&eta_mat)) * l0_mat * expm(&eta_mat);
    let l = model.expand(&l_mat)?;
    let p = split.k_coords(&l);
    let r_plus = eval_r_plus(spec, &fac.q)?;
    let block = split.restrict_perp(&r_plus.matrix);
    let rhs = split.perp_coords(&l);
    let xi_perp_coords = block.lu().solve(&(-rhs)).ok_or(Error::Singular {
        sigma: r_plus.sigma_min,
        threshold: spec.sigma_threshold,
    })?;
    let xi = split.from_perp_coords(&xi_perp_coords);
    Ok(PhaseState {
        q: fac.q.clone(),
        p,
        xi,
        time: t,
    })
}

/// Exact solution of the rational sector by projection of the straight-line
/// motion `X(t) = X_0 + t L_0` on the algebra.
pub fn solve_geodesic_algebra(
    spec: &RMatrixSpec,
    state0: &PhaseState,
    times: &[f64],
) -> Result<TrajectoryRecord> {
    if spec.kind != RKind::Rational {
        return Err(Error::Unsupported(
            "algebra geodesic projection applies to the rational family".into(),
        ));
    }
    require_constrained(spec, state0)?;
    let model = &spec.model;
    let kmax = (spec.model.rank + 1).max(3);
    let l0 = lax(spec, state0)?;
    let l0_mat = model.realize(&l0.coeffs);
    let x0 = model.realize(&spec.q_full(&state0.q));

    let mut record = TrajectoryRecord {
        times: Vec::new(),
        states: Vec::new(),
        invariants: Vec::new(),
        newton_iters: Vec::new(),
        solver: SolverTag::GeodesicAlgebra,
        truncated: None,
        kmax,
    };
    let mut warm_q = state0.q.clone();
    let mut warm_eta = CoeffVec::zeros(spec.split.perp_dim());
    let t0 = times.first().copied().unwrap_or(0.0);
    for &t in times {
        let x = &x0 + &l0_mat * C64::new(t - t0, 0.0);
        let step = (|| -> Result<(PhaseState, FactorizationResult)> {
            let fac = algebra_factorize(spec, &x, &warm_q, &warm_eta)?;
            let state = recover_state(spec, &fac, &l0_mat, t)?;
            Ok((state, fac))
        })();
        match step {
            Ok((state, fac)) => {
                warm_q = fac.q.clone();
                warm_eta = fac.eta.clone();
                record.newton_iters.push(fac.iterations);
                record
                    .invariants
                    .push(invariant_sample(spec, &state, kmax)?);
                record.times.push(t);
                record.states.push(state);
            }
            Err(err) => {
                record.truncated = Some(TruncationInfo {
                    at_time: t,
                    reason: err.to_string(),
                });
                break;
            }
        }
    }
    Ok(record)
}

fn add_scaled(state: &PhaseState, d: &StateDerivative, c: f64) -> PhaseState {
    PhaseState {
        q: &state.q + &d.dq * c,
        p: &state.p + &d.dp * c,
        xi: &state.xi + &d.dxi * c,
        time: state.time + c,
    }
}

fn rk4_step(spec: &RMatrixSpec, state: &PhaseState, dt: f64) -> Result<PhaseState> {
    let k1 = eom_rhs(spec, state)?;
    let k2 = eom_rhs(spec, &add_scaled(state, &k1, dt / 2.0))?;
    let k3 = eom_rhs(spec, &add_scaled(state, &k2, dt / 2.0))?;
    let k4 = eom_rhs(spec, &add_scaled(state, &k3, dt))?;
    let combined = StateDerivative {
        dq: (&k1.dq + &k2.dq * 2.0 + &k3.dq * 2.0 + &k4.dq) / 6.0,
        dp: (&k1.dp + &k2.dp * 2.0 + &k3.dp * 2.0 + &k4.dp) / 6.0,
        dxi: (&k1.dxi + &k2.dxi * 2.0 + &k3.dxi * 2.0 + &k4.dxi) / 6.0,
    };
    Ok(add_scaled(state, &combined, dt))
}

/// Classical fixed-step RK4 on the Hamilton equations, recording at the
/// given sample times (each sample interval is subdivided into steps of
/// size as close to `dt` as divisibility allows).
pub fn integrate_rk4(
    spec: &RMatrixSpec,
    state0: &PhaseState,
    times: &[f64],
    dt: f64,
) -> Result<TrajectoryRecord> {
    if dt <= 0.0 {
        return Err(Error::Precondition("dt must be positive".into()));
    }
    require_constrained(spec, state0)?;
    let kmax = (spec.model.rank + 1).max(3);
    let mut record = TrajectoryRecord {
        times: Vec::new(),
        states: Vec::new(),
        invariants: Vec::new(),
        newton_iters: Vec::new(),
        solver: SolverTag::Rk4,
        truncated: None,
        kmax,
    };
    let mut state = state0.clone();
    state.time = times.first().copied().unwrap_or(0.0);
    'outer: for (j, &t) in times.iter().enumerate() {
        if j > 0 {
            let span = t - times[j - 1];
            if span <= 0.0 {
                return Err(Error::GridMismatch("time grid must be increasing".into()));
            }
            let steps = (span / dt).round().max(1.0) as usize;
            let step_size = span / steps as f64;
            for _ in 0..steps {
                match rk4_step(spec, &state, step_size) {
                    Ok(next) => state = next,
                    Err(err) => {
                        record.truncated = Some(TruncationInfo {
                            at_time: state.time,
                            reason: err.to_string(),
                        });
                        break 'outer;
                    }
                }
            }
            state.time = t;
        }
        match invariant_sample(spec, &state, kmax) {
            Ok(inv) => {
                record.invariants.push(inv);
                record.newton_iters.push(0);
                record.times.push(t);
                record.states.push(state.clone());
            }
            Err(err) => {
                record.truncated = Some(TruncationInfo {
                    at_time: t,
                    reason: err.to_string(),
                });
                break;
            }
        }
    }
    Ok(record)
}

/// Per-invariant maximum deviations between two runs on a common grid.
#[derive(Debug, Clone, serde::Serialize)]
pub struct ComparisonReport {
    pub solver_a: String,
    pub solver_b: String,
    pub samples_compared: usize,
    pub max_h_dev: f64,
    /// per power k = 1..kmax
    pub max_trace_dev: Vec<f64>,
    pub max_eig_dev: f64,
    pub used_charpoly_fallback: bool,
    pub max_casimir_dev: f64,
    /// Gauge-dependent raw spin deviation (reported, never gated).
    pub max_xi_dev: f64,
    pub tolerance: f64,
    pub pass: bool,
    pub truncated: bool,
}

/// Compare two trajectory records on their common grid prefix.
pub fn compare_runs(
    a: &TrajectoryRecord,
    b: &TrajectoryRecord,
    tolerance: f64,
) -> Result<ComparisonReport> {
    let n = a.times.len().min(b.times.len());
    if n == 0 {
        return Err(Error::GridMismatch("no overlapping samples".into()));
    }
    for j in 0..n {
        if (a.times[j] - b.times[j]).abs() > 1e-12 {
            return Err(Error::GridMismatch(format!(
                "grids differ at sample {j}: {} vs {}",
                a.times[j], b.times[j]
            )));
        }
    }
    let kmax = a.kmax.min(b.kmax);
    let mut max_h_dev = 0.0_f64;
    let mut max_trace_dev = vec![0.0_f64; kmax];
    let mut max_eig_dev = 0.0_f64;
    let mut fallback = false;
    let mut max_casimir_dev = 0.0_f64;
    let mut max_xi_dev = 0.0_f64;
    for j in 0..n {
        let ia = &a.invariants[j];
        let ib = &b.invariants[j];
        max_h_dev = max_h_dev.max((ia.h - ib.h).abs());
        for (k, dev) in max_trace_dev.iter_mut().enumerate() {
            *dev = dev.max((ia.spectral.traces[k] - ib.spectral.traces[k]).norm());
        }
        match (&ia.spectral.eigenvalues, &ib.spectral.eigenvalues) {
            (Some(ea), Some(eb)) => {
                max_eig_dev = max_eig_dev.max(spectrum_deviation(ea, eb));
            }
            _ => {
                fallback = true;
                let dev = ia
                    .spectral
                    .char_poly
                    .iter()
                    .zip(&ib.spectral.char_poly)
                    .map(|(x, y)| (x - y).norm())
                    .fold(0.0, f64::max);
                max_eig_dev = max_eig_dev.max(dev);
            }
        }
        max_casimir_dev = max_casimir_dev.max((ia.casimir2 - ib.casimir2).abs());
        max_xi_dev = max_xi_dev.max((&a.states[j].xi - &b.states[j].xi).norm());
    }
    let pass = max_h_dev < tolerance
        && max_trace_dev.iter().all(|d| *d < tolerance)
        && max_eig_dev < tolerance
        && max_casimir_dev < tolerance;
    Ok(ComparisonReport {
        solver_a: a.solver.as_str().to_string(),
        solver_b: b.solver.as_str().to_string(),
        samples_compared: n,
        max_h_dev,
        max_trace_dev,
        max_eig_dev,
        used_charpoly_fallback: fallback,
        max_casimir_dev,
        max_xi_dev,
        tolerance,
        pass,
        truncated: a.truncated.is_some() || b.truncated.is_some(),
    })
}

/// Maximum drift of each gauge invariant along a single record (against the
/// initial sample). `higher_casimir_drift` tracks `tr(xi^3)`, the next
/// trace Casimir of the spin.
#[derive(Debug, Clone, serde::Serialize)]
pub struct DriftReport {
    pub h_drift: f64,
    pub eig_drift: f64,
    pub casimir_drift: f64,
    pub higher_casimir_drift: f64,
    pub xi_k_max: f64,
}

pub fn invariant_drift(spec: &RMatrixSpec, record: &TrajectoryRecord) -> DriftReport {
    let mut h_drift = 0.0_f64;
    let mut eig_drift = 0.0_f64;
    let mut casimir_drift = 0.0_f64;
    let mut higher_casimir_drift = 0.0_f64;
    let mut xi_k_max = 0.0_f64;
    let tr_xi3 = |state: &PhaseState| -> C64 {
        let m = spec.model.realize(&state.xi);
        (&m * &m * &m).trace()
    };
    if let (Some(first), Some(s0)) = (record.invariants.first(), record.states.first()) {
        let c3_0 = tr_xi3(s0);
        for (inv, state) in record.invariants.iter().zip(&record.states) {
            h_drift = h_drift.max((inv.h - first.h).abs());
            casimir_drift = casimir_drift.max((inv.casimir2 - first.casimir2).abs());
            higher_casimir_drift = higher_casimir_drift.max((tr_xi3(state) - c3_0).norm());
            if let (Some(e0), Some(e)) = (&first.spectral.eigenvalues, &inv.spectral.eigenvalues) {
                eig_drift = eig_drift.max(spectrum_deviation(e0, e));
            }
            xi_k_max = xi_k_max.max(state.xi_k_norm(spec));
        }
    }
    DriftReport {
        h_drift,
        eig_drift,
        casimir_drift,
        higher_casimir_drift,
        xi_k_max,
    }
}

/// Uniform sample grid over `[t0, t1]` with `n` samples.
pub fn uniform_grid(t0: f64, t1: f64, n: usize) -> Vec<f64> {
    assert!(n >= 2);
    (0..n)
        .map(|j| t0 + (t1 - t0) * j as f64 / (n - 1) as f64)
        .collect()
}

#[cfg(test)]
mod tests;
