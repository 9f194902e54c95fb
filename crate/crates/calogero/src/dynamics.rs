//! The phase space `M = T* K-check x G*`, its Poisson structure, the
//! quasi-Lax operator `L = p - (R + nu/2) xi`, the spin Calogero Hamiltonian
//! and constrained equations of motion, gauge transformations and the
//! twisted-momentum-map consistency check.

use crate::error::{Error, Result};
use crate::linalg::{self, expm, expm_real};
use crate::rmatrix::{eval_r, eval_r_plus, nabla_r, RMatrixSpec};
use crate::{CoeffVec, OpMatrix, C64};
use rand::Rng;
use serde::{Deserialize, Serialize};

/// A point of the phase space. `q` and `p` are K-coordinates with respect
/// to the split's K basis; `xi` is a coefficient vector over the model
/// basis.
#[derive(Debug, Clone, PartialEq)]
pub struct PhaseState {
    pub q: CoeffVec,
    pub p: CoeffVec,
    pub xi: CoeffVec,
    pub time: f64,
}

/// Serialization mirror of [`PhaseState`].
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct PhaseStateData {
    pub q: Vec<f64>,
    pub p: Vec<f64>,
    pub xi: Vec<f64>,
    pub t: f64,
}

impl PhaseState {
    pub fn new(q: CoeffVec, p: CoeffVec, xi: CoeffVec) -> PhaseState {
        PhaseState {
            q,
            p,
            xi,
            time: 0.0,
        }
    }

    pub fn to_data(&self) -> PhaseStateData {
        PhaseStateData {
            q: self.q.iter().cloned().collect(),
            p: self.p.iter().cloned().collect(),
            xi: self.xi.iter().cloned().collect(),
            t: self.time,
        }
    }

    pub fn from_data(d: &PhaseStateData) -> PhaseState {
        PhaseState {
            q: CoeffVec::from_vec(d.q.clone()),
            p: CoeffVec::from_vec(d.p.clone()),
            xi: CoeffVec::from_vec(d.xi.clone()),
            time: d.t,
        }
    }

    /// Norm of the K-component of xi (zero on the constraint surface).
    pub fn xi_k_norm(&self, spec: &RMatrixSpec) -> f64 {
        spec.split.project(&self.xi).0.norm()
    }

    pub fn is_constrained(&self, spec: &RMatrixSpec) -> bool {
        self.xi_k_norm(spec) < 1e-10
    }
}

/// The quasi-Lax operator value at a state.
#[derive(Debug, Clone)]
pub struct LaxValue {
    pub coeffs: CoeffVec,
    pub constrained: bool,
}

/// `L = p - (R(q) + nu/2) xi`.
pub fn lax(spec: &RMatrixSpec, state: &PhaseState) -> Result<LaxValue> {
    let r_plus = eval_r_plus(spec, &state.q)?;
    Ok(lax_with_op(spec, state, &r_plus.matrix))
}

/// Lax value given a precomputed `R_+` operator (same base point).
pub fn lax_with_op(spec: &RMatrixSpec, state: &PhaseState, r_plus: &OpMatrix) -> LaxValue {
    let p_full = spec.split.from_k_coords(&state.p);
    let coeffs = p_full - r_plus * &state.xi;
    LaxValue {
        coeffs,
        constrained: state.is_constrained(spec),
    }
}

/// The spin Calogero Hamiltonian
/// `H = 1/2 <p,p> - 1/2 <xi_perp, R^2 xi_perp> - nu/2 <p, xi_K>
///  + nu^2/8 <xi, xi>`.
pub fn hamiltonian(spec: &RMatrixSpec, state: &PhaseState) -> Result<f64> {
    let r = eval_r(spec, &state.q)?.matrix;
    Ok(hamiltonian_with_op(spec, state, &r))
}

/// Evaluate the Hamiltonian with a precomputed `R` operator. Note that
/// `-1/2 <xi_perp, R^2 xi_perp> = +1/2 <R xi_perp, R xi_perp>` by
/// antisymmetry of R.
pub fn hamiltonian_with_op(spec: &RMatrixSpec, state: &PhaseState, r: &OpMatrix) -> f64 {
    let model = &spec.model;
    let p_full = spec.split.from_k_coords(&state.p);
    let (xi_k, xi_perp) = spec.split.project(&state.xi);
    let r_xi = r * &xi_perp;
    let nu = spec.nu;
    0.5 * model.pairing(&p_full, &p_full) + 0.5 * model.pairing(&r_xi, &r_xi)
        - 0.5 * nu * model.pairing(&p_full, &xi_k)
        + nu * nu / 8.0 * model.pairing(&state.xi, &state.xi)
}

/// Tangent vector of the flow: `dq`, `dp` in K-coordinates, `dxi` over the
/// model basis.
#[derive(Debug, Clone)]
pub struct StateDerivative {
    pub dq: CoeffVec,
    pub dp: CoeffVec,
    pub dxi: CoeffVec,
}

/// Right-hand side of the Hamilton equations
/// `dq = p - nu/2 xi_K`, `dp = -<R xi_perp, (nabla R) xi_perp>`,
/// `dxi = [xi, nu/2 p + R^2 xi_perp]` (whose K-component vanishes
/// identically and is projected out).
pub fn eom_rhs(spec: &RMatrixSpec, state: &PhaseState) -> Result<StateDerivative> {
    let model = &spec.model;
    let split = &spec.split;
    let rank = spec.rank();
    let (r_op, grads) = crate::rmatrix::r_with_gradients(spec, &state.q)?;
    let r = r_op.matrix;
    let (xi_k, xi_perp) = split.project(&state.xi);
    let p_full = split.from_k_coords(&state.p);

    let dq = &state.p - split.k_coords(&xi_k) * (spec.nu / 2.0);

    let r_xi = &r * &xi_perp;
    let mut w = CoeffVec::zeros(rank);
    for i in 0..rank {
        w[i] = -model.pairing(&r_xi, &(&grads[i] * &xi_perp));
    }
    let dp = &split.gram_k_inv * w;

    let z = &p_full * (spec.nu / 2.0) + &r * &r_xi;
    let dxi = split.project(&model.bracket(&state.xi, &z)).1;

    Ok(StateDerivative { dq, dp, dxi })
}

/// An observable on the phase space with optional analytic gradient.
pub struct Observable {
    pub name: String,
    pub eval: Box<dyn Fn(&PhaseState) -> f64 + Sync>,
    pub grad: Option<GradientFn>,
}

pub type GradientFn = Box<dyn Fn(&PhaseState) -> ObservableGradient + Sync>;

/// Gradient data of an observable: `dq[i]` is the derivative along the K
/// basis direction `T_i` in q, `dp[i]` along the dual direction `T^i` in p,
/// and `dxi` is the algebra-valued gradient w.r.t. xi.
#[derive(Debug, Clone)]
pub struct ObservableGradient {
    pub dq: CoeffVec,
    pub dp: CoeffVec,
    pub dxi: CoeffVec,
}

impl Observable {
    pub fn new(name: impl Into<String>, f: impl Fn(&PhaseState) -> f64 + Sync + 'static) -> Self {
        Observable {
            name: name.into(),
            eval: Box::new(f),
            grad: None,
        }
    }

    /// Coordinate observable `q^i`.
    pub fn q_coord(i: usize) -> Self {
        Observable::new(format!("q^{}", i + 1), move |s: &PhaseState| s.q[i])
    }

    /// Momentum coordinate `p_i = <p, T_i>`.
    pub fn p_coord(spec: &RMatrixSpec, i: usize) -> Self {
        let gram_k = spec.split.gram_k.clone();
        Observable::new(format!("p_{}", i + 1), move |s: &PhaseState| {
            (gram_k.row(i) * &s.p)[(0, 0)]
        })
    }

    /// Spin coordinate `xi_a = <xi, T_a>`.
    pub fn xi_coord(spec: &RMatrixSpec, a: usize) -> Self {
        let gram = spec.model.gram.clone();
        Observable::new(format!("xi_{a}"), move |s: &PhaseState| {
            (gram.row(a) * &s.xi)[(0, 0)]
        })
    }

    /// Gradient by central finite differences with per-coordinate step
    /// `1e-6 (1 + |coordinate|)`, or the registered analytic gradient.
    pub fn gradient(&self, spec: &RMatrixSpec, state: &PhaseState) -> ObservableGradient {
        if let Some(g) = &self.grad {
            return g(state);
        }
        let rank = spec.rank();
        let dim = spec.model.dim;
        let f = &self.eval;
        let mut dq = CoeffVec::zeros(rank);
        for i in 0..rank {
            let h = 1e-6 * (1.0 + state.q[i].abs());
            let mut sp = state.clone();
            let mut sm = state.clone();
            sp.q[i] += h;
            sm.q[i] -= h;
            dq[i] = (f(&sp) - f(&sm)) / (2.0 * h);
        }
        let mut dp = CoeffVec::zeros(rank);
        for i in 0..rank {
            let h = 1e-6 * (1.0 + state.p[i].abs());
            let dir = spec.split.gram_k_inv.column(i).clone_owned();
            let mut sp = state.clone();
            let mut sm = state.clone();
            sp.p += &dir * h;
            sm.p -= &dir * h;
            dp[i] = (f(&sp) - f(&sm)) / (2.0 * h);
        }
        let mut dxi_pairings = CoeffVec::zeros(dim);
        for a in 0..dim {
            let h = 1e-6 * (1.0 + state.xi[a].abs());
            let mut sp = state.clone();
            let mut sm = state.clone();
            sp.xi[a] += h;
            sm.xi[a] -= h;
            dxi_pairings[a] = (f(&sp) - f(&sm)) / (2.0 * h);
        }
        let dxi = &spec.model.gram_inv * dxi_pairings;
        ObservableGradient { dq, dp, dxi }
    }
}

/// The Hamiltonian as an observable with its analytic gradient
/// (`dH/dq^i = <R xi_perp, dR/dq^i xi_perp>`,
/// `grad_p H = p - nu/2 xi_K`,
/// `grad_xi H = -R^2 xi_perp - nu/2 p + nu^2/4 xi`).
pub fn hamiltonian_observable(spec: std::sync::Arc<RMatrixSpec>) -> Observable {
    let eval_spec = spec.clone();
    let grad_spec = spec.clone();
    Observable {
        name: "H".into(),
        eval: Box::new(move |state: &PhaseState| {
            hamiltonian(&eval_spec, state).expect("regular state")
        }),
        grad: Some(Box::new(move |state: &PhaseState| {
            let spec = &grad_spec;
            let model = &spec.model;
            let split = &spec.split;
            let rank = spec.rank();
            let (r_op, grads) =
                crate::rmatrix::r_with_gradients(spec, &state.q).expect("regular state");
            let (xi_k, xi_perp) = split.project(&state.xi);
            let r_xi = &r_op.matrix * &xi_perp;
            let dq = CoeffVec::from_fn(rank, |i, _| model.pairing(&r_xi, &(&grads[i] * &xi_perp)));
            let dp = &state.p - split.k_coords(&xi_k) * (spec.nu / 2.0);
            let p_full = split.from_k_coords(&state.p);
            let dxi = -(&r_op.matrix * &r_xi) - p_full * (spec.nu / 2.0)
                + &state.xi * (spec.nu * spec.nu / 4.0);
            ObservableGradient { dq, dp, dxi }
        })),
    }
}

/// Poisson bracket `{f, g}` at a state: canonical T*K part plus the
/// Lie-Poisson part `<xi, [grad_xi f, grad_xi g]>`, with the sign fixed so
/// that `{xi_a, xi_b} = f_{ab}^c xi_c`.
pub fn poisson_bracket(
    spec: &RMatrixSpec,
    f: &Observable,
    g: &Observable,
    state: &PhaseState,
) -> f64 {
    let gf = f.gradient(spec, state);
    let gg = g.gradient(spec, state);
    let canonical = gf.dq.dot(&gg.dp) - gf.dp.dot(&gg.dq);
    let lie = spec
        .model
        .pairing(&state.xi, &spec.model.bracket(&gf.dxi, &gg.dxi));
    canonical + lie
}

/// The quasi-Lax anomaly matrix
/// `{L_a, L_b} - ([R_12, L_1 + L_2] - nabla_{xi_K} R_12)_{ab}`,
/// with the brackets of the `L` components evaluated by central finite
/// differences (independent of the algebraic right-hand side).
///
/// `r_scale` deliberately corrupts the r-matrix (and its derivatives) by a
/// constant factor; 1.0 is the honest evaluation.
pub fn anomaly_residual_scaled(
    spec: &RMatrixSpec,
    state: &PhaseState,
    r_scale: f64,
) -> Result<OpMatrix> {
    let model = &spec.model;
    let split = &spec.split;
    let dim = model.dim;
    let rank = spec.rank();
    let gram = &model.gram;

    let r_plus_op = |q: &CoeffVec| -> Result<OpMatrix> {
        let id = OpMatrix::identity(dim, dim);
        Ok(eval_r(spec, q)?.matrix * r_scale + id * (spec.nu / 2.0))
    };

    // Jacobians of the L coefficient vector by central differences. The
    // q-columns re-evaluate the r-matrix; the p/xi columns reuse it.
    let r_plus_0 = r_plus_op(&state.q)?;
    let l0 = split.from_k_coords(&state.p) - &r_plus_0 * &state.xi;

    let mut jq = OpMatrix::zeros(dim, rank);
    for i in 0..rank {
        let h = 1e-6 * (1.0 + state.q[i].abs());
        let mut qp = state.q.clone();
        let mut qm = state.q.clone();
        qp[i] += h;
        qm[i] -= h;
        let col = ((r_plus_op(&qm)? - r_plus_op(&qp)?) * &state.xi) / (2.0 * h);
        jq.set_column(i, &col);
    }
    let mut jp = OpMatrix::zeros(dim, rank);
    for i in 0..rank {
        let h = 1e-6 * (1.0 + state.p[i].abs());
        let dir = split.gram_k_inv.column(i).clone_owned();
        let col = split.from_k_coords(&(&dir * (2.0 * h))) / (2.0 * h);
        jp.set_column(i, &col);
    }
    let mut jxi = OpMatrix::zeros(dim, dim);
    for a in 0..dim {
        let h = 1e-6 * (1.0 + state.xi[a].abs());
        let mut xp = state.xi.clone();
        let mut xm = state.xi.clone();
        xp[a] += h;
        xm[a] -= h;
        let col = (&r_plus_0 * (xm - xp)) / (2.0 * h);
        jxi.set_column(a, &col);
    }

    // component functions L_a = <L, T_a>: rows of gram * J
    let la_q = gram * &jq;
    let la_p = gram * &jp;
    let la_xi = gram * &jxi; // W[a, c] = dL_a / dxi_c

    // gradients w.r.t. xi as algebra elements (column a = grad of L_a)
    let grad_xi = &model.gram_inv * la_xi.transpose();

    let mut lhs = OpMatrix::zeros(dim, dim);
    let gram_xi = (state.xi.transpose() * gram).transpose();
    for a in 0..dim {
        let ga = grad_xi.column(a).clone_owned();
        let ad_ga = model.ad_op(&ga);
        for b in 0..dim {
            let canonical = (la_q.row(a) * la_p.row(b).transpose())[(0, 0)]
                - (la_p.row(a) * la_q.row(b).transpose())[(0, 0)];
            let lie = gram_xi.dot(&(&ad_ga * grad_xi.column(b)));
            lhs[(a, b)] = canonical + lie;
        }
    }

    // right-hand side [R_12, L_1 + L_2] - nabla_{xi_K} R_12 in components
    let r = eval_r(spec, &state.q)?.matrix * r_scale;
    let ad_l = model.ad_op(&l0);
    let v = -(gram * ad_l * &model.gram_inv); // V[a,c] = <[T^c, L], T_a>
    let r12 = gram * &r;
    let xi_k_coords = split.k_coords(&state.xi);
    let mut grad_op = OpMatrix::zeros(dim, dim);
    for i in 0..rank {
        if xi_k_coords[i].abs() > 0.0 {
            let mut e_i = CoeffVec::zeros(rank);
            e_i[i] = 1.0;
            grad_op += nabla_r(spec, &state.q, &e_i)? * (r_scale * xi_k_coords[i]);
        }
    }
    let rhs = &v * &r12 + &r12 * v.transpose() - gram * grad_op;

    Ok(lhs - rhs)
}

/// Honest anomaly residual (no corruption).
pub fn anomaly_residual(spec: &RMatrixSpec, state: &PhaseState) -> Result<OpMatrix> {
    anomaly_residual_scaled(spec, state, 1.0)
}

/// Gauge transformation by `exp(kappa)`, `kappa` in K (K-coordinates):
/// conjugates `xi` and `L` in the realization, leaves `(q, p)` fixed.
pub fn gauge_transform(
    spec: &RMatrixSpec,
    state: &PhaseState,
    l: &LaxValue,
    kappa: &CoeffVec,
) -> Result<(PhaseState, LaxValue)> {
    let model = &spec.model;
    let kappa_full = spec.split.from_k_coords(kappa);
    let u = expm(&model.realize(&kappa_full));
    let u_inv = u
        .clone()
        .try_inverse()
        .ok_or_else(|| Error::Construction("exp(kappa) not invertible".into()))?;
    let xi_mat = model.realize(&state.xi);
    let l_mat = model.realize(&l.coeffs);
    let new_xi = model.expand(&(&u * xi_mat * &u_inv))?;
    let new_l = model.expand(&(&u * l_mat * &u_inv))?;
    Ok((
        PhaseState {
            q: state.q.clone(),
            p: state.p.clone(),
            xi: new_xi,
            time: state.time,
        },
        LaxValue {
            coeffs: new_l,
            constrained: l.constrained,
        },
    ))
}

/// Gauge-invariant spectral data of an algebra element.
#[derive(Debug, Clone)]
pub struct SpectralData {
    /// `tr(L^k)` for k = 1..=kmax.
    pub traces: Vec<C64>,
    /// Sorted eigenvalues, absent when the eigensolver failed.
    pub eigenvalues: Option<Vec<C64>>,
    /// Characteristic polynomial coefficients (comparison fallback).
    pub char_poly: Vec<C64>,
}

pub fn spectral_invariants(
    model: &crate::liealg::LieAlgebraModel,
    elem: &CoeffVec,
    kmax: usize,
) -> SpectralData {
    let m = model.realize(elem);
    let mut traces = Vec::with_capacity(kmax);
    let mut power = m.clone();
    for k in 1..=kmax {
        if k > 1 {
            power = &power * &m;
        }
        traces.push(power.trace());
    }
    let eigenvalues = linalg::eigenvalues(&m).ok();
    let char_poly = linalg::char_poly(&m);
    SpectralData {
        traces,
        eigenvalues,
        char_poly,
    }
}

/// Both sides of the momentum-map constraint equivalence:
/// `r1 = || theta(J) - e^{-ad_q} J + xi ||` and
/// `r2 = || (xi_K, theta(J) - J_K + R_+ xi_perp) ||`
/// (Euclidean norms of coefficient vectors).
pub fn momentum_constraint_check(
    spec: &RMatrixSpec,
    q: &CoeffVec,
    j: &CoeffVec,
    xi: &CoeffVec,
) -> Result<(f64, f64)> {
    let model = &spec.model;
    let split = &spec.split;
    let q_full = spec.q_full(q);
    let theta_j = spec.theta.apply(j);
    let exp_neg_ad = expm_real(&(-model.ad_op(&q_full)));
    let r1 = (&theta_j - exp_neg_ad * j + xi).norm();

    let (j_k, _) = split.project(j);
    let (xi_k, xi_perp) = split.project(xi);
    let r_plus = eval_r_plus(spec, q)?.matrix;
    let second = &theta_j - j_k + &r_plus * xi_perp;
    let r2 = (xi_k.norm_squared() + second.norm_squared()).sqrt();
    Ok((r1, r2))
}

/// The gauge-slice solution `J = J_K - theta^{-1} R_+(q) xi_perp` of the
/// momentum constraint for a constrained spin value.
pub fn momentum_gauge_slice(
    spec: &RMatrixSpec,
    q: &CoeffVec,
    j_k_coords: &CoeffVec,
    xi_perp: &CoeffVec,
) -> Result<CoeffVec> {
    let r_plus = eval_r_plus(spec, q)?.matrix;
    let theta_inv = spec
        .theta
        .op
        .clone()
        .try_inverse()
        .ok_or_else(|| Error::Construction("automorphism not invertible".into()))?;
    Ok(spec.split.from_k_coords(j_k_coords) - theta_inv * (r_plus * xi_perp))
}

/// Random element of the model with coefficients in `[-scale, scale]`.
pub fn random_elem<R: Rng>(
    model: &crate::liealg::LieAlgebraModel,
    rng: &mut R,
    scale: f64,
) -> CoeffVec {
    CoeffVec::from_fn(model.dim, |_, _| rng.gen_range(-scale..scale))
}

/// Random phase state at a regular base point; `constrained` projects the
/// spin to K-perp.
pub fn random_state<R: Rng>(
    spec: &RMatrixSpec,
    rng: &mut R,
    scale: f64,
    constrained: bool,
) -> PhaseState {
    let q = crate::rmatrix::sample_regular_q(spec, rng, scale);
    let p = CoeffVec::from_fn(spec.rank(), |_, _| rng.gen_range(-scale..scale));
    let mut xi = random_elem(&spec.model, rng, scale);
    if constrained {
        xi = spec.split.project(&xi).1;
    }
    PhaseState::new(q, p, xi)
}

/// Constrained random state suited for trajectory runs: wide regularity
/// margin at the base point and moderate momenta, so the flow stays inside
/// the regular set over unit-time horizons.
pub fn random_trajectory_state<R: Rng>(spec: &RMatrixSpec, rng: &mut R, scale: f64) -> PhaseState {
    let q = crate::rmatrix::sample_regular_q_with_margin(spec, rng, 1.2, 0.5);
    let p = CoeffVec::from_fn(spec.rank(), |_, _| rng.gen_range(-0.15..0.15) * scale);
    let xi_raw = CoeffVec::from_fn(spec.model.dim, |_, _| rng.gen_range(-0.5..0.5) * scale);
    let xi = spec.split.project(&xi_raw).1;
    PhaseState::new(q, p, xi)
}
