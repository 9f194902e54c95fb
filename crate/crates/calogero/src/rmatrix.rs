//! Dynamical r-matrices: the rational family `R(q) = (ad_q|_perp)^{-1}`
//! and the trigonometric family
//! `R(q) = (1/2)(theta e^{ad_q} + 1)(theta e^{ad_q} - 1)^{-1}` on K-perp,
//! both vanishing on K. Includes directional derivatives, the CDYBE
//! residual and the Cayley transform with its identity report.

use crate::error::{Error, Result};
use crate::liealg::{Automorphism, LieAlgebraModel, SubalgebraSplit};
use crate::linalg::{expm_real, smallest_singular_value};
use crate::{CoeffVec, OpMatrix};
use rand::Rng;
use std::sync::Arc;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RKind {
    Rational,
    Trigonometric,
}

/// A dynamical r-matrix family bound to a model, a split and (for the
/// trigonometric kind) an automorphism fixing K pointwise.
#[derive(Debug, Clone)]
pub struct RMatrixSpec {
    pub kind: RKind,
    pub model: Arc<LieAlgebraModel>,
    pub split: Arc<SubalgebraSplit>,
    pub theta: Arc<Automorphism>,
    /// CDYBE coupling: 0 for the rational family, 1 for the trigonometric.
    pub nu: f64,
    /// Regularity threshold on the smallest singular value of the
    /// restricted operator that gets inverted.
    pub sigma_threshold: f64,
}

impl RMatrixSpec {
    pub fn trigonometric(
        model: Arc<LieAlgebraModel>,
        split: Arc<SubalgebraSplit>,
        theta: Arc<Automorphism>,
    ) -> Result<RMatrixSpec> {
        check_theta(&model, &split, &theta)?;
        Ok(RMatrixSpec {
            kind: RKind::Trigonometric,
            model,
            split,
            theta,
            nu: 1.0,
            sigma_threshold: 1e-8,
        })
    }

    pub fn rational(
        model: Arc<LieAlgebraModel>,
        split: Arc<SubalgebraSplit>,
    ) -> Result<RMatrixSpec> {
        let theta = Arc::new(Automorphism::identity(&model));
        Ok(RMatrixSpec {
            kind: RKind::Rational,
            model,
            split,
            theta,
            nu: 0.0,
            sigma_threshold: 1e-8,
        })
    }

    pub fn rank(&self) -> usize {
        self.split.rank()
    }

    /// Full coefficient vector of the base point given in K-coordinates.
    pub fn q_full(&self, q: &CoeffVec) -> CoeffVec {
        self.split.from_k_coords(q)
    }
}

fn check_theta(
    model: &LieAlgebraModel,
    split: &SubalgebraSplit,
    theta: &Automorphism,
) -> Result<()> {
    for k in &split.k_basis {
        if (theta.apply(k) - k).norm() > 1e-10 {
            return Err(Error::Construction(
                "automorphism does not fix K pointwise".into(),
            ));
        }
    }
    let lhs = theta.op.transpose() * &model.gram * &theta.op;
    if (lhs - &model.gram).norm() > 1e-9 {
        return Err(Error::Construction(
            "automorphism does not preserve the scalar product".into(),
        ));
    }
    Ok(())
}

/// The evaluated operator at a base point, with its regularity report.
#[derive(Debug, Clone)]
pub struct OperatorAtPoint {
    /// Base point in K-coordinates.
    pub q: CoeffVec,
    /// Full operator matrix on the model basis.
    pub matrix: OpMatrix,
    /// Smallest singular value of the restricted operator that was inverted.
    pub sigma_min: f64,
}

/// The restricted block that gets inverted: `ad_q|_perp` (rational) or
/// `(theta e^{ad_q} - 1)|_perp` (trigonometric), plus the twist block
/// `theta e^{ad_q}|_perp` itself for the trigonometric kind.
fn inversion_block(spec: &RMatrixSpec, q: &CoeffVec) -> (OpMatrix, Option<OpMatrix>) {
    let q_full = spec.q_full(q);
    let ad_q = spec.model.ad_op(&q_full);
    match spec.kind {
        RKind::Rational => (spec.split.restrict_perp(&ad_q), None),
        RKind::Trigonometric => {
            let twist = &spec.theta.op * expm_real(&ad_q);
            let m = spec.split.restrict_perp(&twist);
            let a = &m - OpMatrix::identity(m.nrows(), m.ncols());
            (a, Some(m))
        }
    }
}

fn checked_inverse(spec: &RMatrixSpec, a: &OpMatrix) -> Result<(OpMatrix, f64)> {
    let sigma = smallest_singular_value(a);
    if sigma < spec.sigma_threshold {
        return Err(Error::Singular {
            sigma,
            threshold: spec.sigma_threshold,
        });
    }
    let inv = a.clone().try_inverse().ok_or(Error::Singular {
        sigma,
        threshold: spec.sigma_threshold,
    })?;
    Ok((inv, sigma))
}

/// Evaluate R(q).
pub fn eval_r(spec: &RMatrixSpec, q: &CoeffVec) -> Result<OperatorAtPoint> {
    let (a, twist) = inversion_block(spec, q);
    let (a_inv, sigma_min) = checked_inverse(spec, &a)?;
    let block = match spec.kind {
        RKind::Rational => a_inv,
        RKind::Trigonometric => {
            let m = twist.unwrap();
            let id = OpMatrix::identity(m.nrows(), m.ncols());
            (m + id) * a_inv * 0.5
        }
    };
    Ok(OperatorAtPoint {
        q: q.clone(),
        matrix: spec.split.embed_perp(&block),
        sigma_min,
    })
}

/// Evaluate `R_+(q) = R(q) + nu/2` (as an operator on all of G, so `nu/2`
/// on K). The regularity report refers to the invertibility of the
/// K-perp block of `R_+`.
pub fn eval_r_plus(spec: &RMatrixSpec, q: &CoeffVec) -> Result<OperatorAtPoint> {
    let r = eval_r(spec, q)?;
    let dim = spec.model.dim;
    let matrix = &r.matrix + OpMatrix::identity(dim, dim) * (spec.nu / 2.0);
    let sigma_min = smallest_singular_value(&spec.split.restrict_perp(&matrix));
    Ok(OperatorAtPoint {
        q: r.q,
        matrix,
        sigma_min,
    })
}

/// Exact directional derivative of the operator family along `kappa` in K
/// (K-coordinates).
///
/// Both families are analytic functions of the commuting pair
/// `(ad_q, theta)`, so the derivative follows from
/// `d/dt theta e^{ad_{q + t kappa}} = theta e^{ad_q} ad_kappa` and the
/// resolvent rule; no root/weight data is needed.
pub fn nabla_r(spec: &RMatrixSpec, q: &CoeffVec, kappa: &CoeffVec) -> Result<OpMatrix> {
    let kappa_full = spec.split.from_k_coords(kappa);
    let ad_kappa = spec.split.restrict_perp(&spec.model.ad_op(&kappa_full));
    let (a, twist) = inversion_block(spec, q);
    let (a_inv, _) = checked_inverse(spec, &a)?;
    let block = match spec.kind {
        RKind::Rational => -(&a_inv * &ad_kappa * &a_inv),
        RKind::Trigonometric => {
            let m = twist.unwrap();
            let id = OpMatrix::identity(m.nrows(), m.ncols());
            let dm = &m * &ad_kappa;
            (&dm * &a_inv - (&m + id) * &a_inv * &dm * &a_inv) * 0.5
        }
    };
    Ok(spec.split.embed_perp(&block))
}

/// Evaluate R(q) together with all coordinate-direction derivatives
/// `dR/dq^i` in one pass (shares the restricted inverse).
pub fn r_with_gradients(
    spec: &RMatrixSpec,
    q: &CoeffVec,
) -> Result<(OperatorAtPoint, Vec<OpMatrix>)> {
    let (a, twist) = inversion_block(spec, q);
    let (a_inv, sigma_min) = checked_inverse(spec, &a)?;
    let rank = spec.rank();
    let block = match spec.kind {
        RKind::Rational => a_inv.clone(),
        RKind::Trigonometric => {
            let m = twist.as_ref().unwrap();
            let id = OpMatrix::identity(m.nrows(), m.ncols());
            (m + id) * &a_inv * 0.5
        }
    };
    let mut grads = Vec::with_capacity(rank);
    for i in 0..rank {
        let mut e_i = CoeffVec::zeros(rank);
        e_i[i] = 1.0;
        let kappa_full = spec.split.from_k_coords(&e_i);
        let ad_kappa = spec.split.restrict_perp(&spec.model.ad_op(&kappa_full));
        let g = match spec.kind {
            RKind::Rational => -(&a_inv * &ad_kappa * &a_inv),
            RKind::Trigonometric => {
                let m = twist.as_ref().unwrap();
                let id = OpMatrix::identity(m.nrows(), m.ncols());
                let dm = m * &ad_kappa;
                (&dm * &a_inv - (m + id) * &a_inv * &dm * &a_inv) * 0.5
            }
        };
        grads.push(spec.split.embed_perp(&g));
    }
    Ok((
        OperatorAtPoint {
            q: q.clone(),
            matrix: spec.split.embed_perp(&block),
            sigma_min,
        },
        grads,
    ))
}

/// Central finite-difference fallback for the directional derivative, with
/// one Richardson extrapolation step. Used to cross-check the analytic
/// formula.
pub fn nabla_r_fd(spec: &RMatrixSpec, q: &CoeffVec, kappa: &CoeffVec) -> Result<OpMatrix> {
    let h = 1e-5 * (1.0 + q.norm());
    let diff = |step: f64| -> Result<OpMatrix> {
        let qp = q + kappa * step;
        let qm = q - kappa * step;
        Ok((eval_r(spec, &qp)?.matrix - eval_r(spec, &qm)?.matrix) / (2.0 * step))
    };
    let d_h = diff(h)?;
    let d_h2 = diff(h / 2.0)?;
    Ok((d_h2 * 4.0 - d_h) / 3.0)
}

/// The CDYBE residual
/// `E_nu(R; X, Y) = nu^2/4 [X,Y] + [RX, RY] - R([X, RY] + [RX, Y])
///  + <X, (nabla R) Y> + (nabla_{Y_K} R) X - (nabla_{X_K} R) Y`.
pub fn cdybe_residual(
    spec: &RMatrixSpec,
    q: &CoeffVec,
    x: &CoeffVec,
    y: &CoeffVec,
) -> Result<CoeffVec> {
    let model = &spec.model;
    let split = &spec.split;
    let r = eval_r(spec, q)?.matrix;
    let rank = spec.rank();
    let mut grads = Vec::with_capacity(rank);
    for i in 0..rank {
        let mut e_i = CoeffVec::zeros(rank);
        e_i[i] = 1.0;
        grads.push(nabla_r(spec, q, &e_i)?);
    }

    let rx = &r * x;
    let ry = &r * y;
    let mut res = model.bracket(x, y) * (spec.nu * spec.nu / 4.0);
    res += model.bracket(&rx, &ry);
    res -= &r * (model.bracket(x, &ry) + model.bracket(&rx, y));
    let xk = split.k_coords(x);
    let yk = split.k_coords(y);
    for (i, grad) in grads.iter().enumerate() {
        res += &split.k_dual[i] * model.pairing(x, &(grad * y));
        if yk[i] != 0.0 {
            res += grad * x * yk[i];
        }
        if xk[i] != 0.0 {
            res -= grad * y * xk[i];
        }
    }
    Ok(res)
}

/// Identity report of the Cayley transform.
#[derive(Debug, Clone)]
pub struct CayleyReport {
    /// `|| C(q)|_K + id_K ||`
    pub k_block_residual: f64,
    /// `|| C(q)|_perp - theta e^{ad_q}|_perp ||`
    pub perp_block_residual: f64,
}

/// Cayley transform `C = R_+ R_-^{-1}` with `R_{+-} = R +- 1/2`, together
/// with the identity report comparing it against `-id` on K and
/// `theta e^{ad_q}` on K-perp.
pub fn cayley(spec: &RMatrixSpec, q: &CoeffVec) -> Result<(OpMatrix, CayleyReport)> {
    let dim = spec.model.dim;
    let id = OpMatrix::identity(dim, dim);
    let r = eval_r(spec, q)?.matrix;
    let r_minus = &r - &id * 0.5;
    let sigma = smallest_singular_value(&r_minus);
    let r_minus_inv = r_minus.try_inverse().ok_or_else(|| {
        Error::CayleyDomain(format!("R - 1/2 is singular (sigma_min {sigma:.3e})"))
    })?;
    if sigma < 1e-12 {
        return Err(Error::CayleyDomain(format!(
            "R - 1/2 numerically singular (sigma_min {sigma:.3e})"
        )));
    }
    let c = (&r + &id * 0.5) * r_minus_inv;

    let k_rank = spec.rank();
    let k_block = spec.split.restrict_k(&c);
    let k_block_residual = (k_block + OpMatrix::identity(k_rank, k_rank)).norm();
    let q_full = spec.q_full(q);
    let twist = &spec.theta.op * expm_real(&spec.model.ad_op(&q_full));
    let perp_block_residual = spec.split.restrict_perp(&(&c - twist)).norm();
    Ok((
        c,
        CayleyReport {
            k_block_residual,
            perp_block_residual,
        },
    ))
}

/// Draw a base point with all K-coordinates in `[-scale, scale]` that is
/// regular for the spec, staying well inside the regular set (the inverse
/// trigonometric potentials amplify roundoff near the walls).
pub fn sample_regular_q<R: Rng>(spec: &RMatrixSpec, rng: &mut R, scale: f64) -> CoeffVec {
    sample_regular_q_with_margin(spec, rng, scale, 0.1)
}

/// As [`sample_regular_q`] with an explicit margin on the smallest singular
/// value of the inverted block (trajectory starts want a wide margin so the
/// flow stays regular over the integration horizon).
pub fn sample_regular_q_with_margin<R: Rng>(
    spec: &RMatrixSpec,
    rng: &mut R,
    scale: f64,
    margin: f64,
) -> CoeffVec {
    let rank = spec.rank();
    let margin = margin.max(100.0 * spec.sigma_threshold);
    for _ in 0..2000 {
        let q = CoeffVec::from_fn(rank, |_, _| rng.gen_range(-scale..scale));
        if let Ok(op) = eval_r(spec, &q) {
            if op.sigma_min > margin {
                return q;
            }
        }
    }
    panic!("could not sample a regular base point after 2000 tries");
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::liealg::{build_model, inner_exp_automorphism, Family, RealForm, Root};
    use rand::SeedableRng;
    use rand_chacha::ChaCha12Rng;

    fn sl2_trig() -> RMatrixSpec {
        let built = build_model(Family::A, 1, RealForm::Split).unwrap();
        let theta = Arc::new(Automorphism::identity(&built.model));
        RMatrixSpec::trigonometric(built.model, built.cartan_split, theta).unwrap()
    }

    fn sl2_rational() -> RMatrixSpec {
        let built = build_model(Family::A, 1, RealForm::Split).unwrap();
        RMatrixSpec::rational(built.model, built.cartan_split).unwrap()
    }

    fn e_vec(spec: &RMatrixSpec) -> CoeffVec {
        let idx = spec.model.roots.split_x_idx[&Root(vec![1, -1])];
        spec.model.basis_elem(idx)
    }

    fn q_one() -> CoeffVec {
        CoeffVec::from_vec(vec![1.0]) // q = diag(1, -1)
    }

    #[test]
    fn trigonometric_sl2_on_root_vector() {
        // R(q) E = (1/2) coth(phi(q)/2) E with phi(q) = 2
        let spec = sl2_trig();
        let r = eval_r(&spec, &q_one()).unwrap();
        let e = e_vec(&spec);
        let want = &e * (0.5 / f64::tanh(1.0));
        assert!((&r.matrix * &e - want).norm() < 1e-13);
    }

    #[test]
    fn r_vanishes_on_k() {
        for spec in [sl2_trig(), sl2_rational()] {
            let r = eval_r(&spec, &q_one()).unwrap();
            let kappa = spec.split.from_k_coords(&q_one());
            assert!((&r.matrix * kappa).norm() < 1e-13);
        }
    }

    #[test]
    fn rational_sl2_on_root_vector() {
        // R(q) E = E / phi(q) = E / 2
        let spec = sl2_rational();
        let r = eval_r(&spec, &q_one()).unwrap();
        let e = e_vec(&spec);
        assert!((&r.matrix * &e - &e * 0.5).norm() < 1e-14);
    }

    #[test]
    fn r_plus_acts_as_half_on_k() {
        let spec = sl2_trig();
        let rp = eval_r_plus(&spec, &q_one()).unwrap();
        let kappa = spec.split.from_k_coords(&q_one());
        assert!((&rp.matrix * &kappa - &kappa * 0.5).norm() < 1e-13);
    }

    #[test]
    fn r_plus_minus_r_is_half_identity_on_perp() {
        let spec = sl2_trig();
        let r = eval_r(&spec, &q_one()).unwrap();
        let rp = eval_r_plus(&spec, &q_one()).unwrap();
        let diff = &rp.matrix - &r.matrix;
        let block = spec.split.restrict_perp(&diff);
        let id = OpMatrix::identity(2, 2);
        assert!((block - id * 0.5).norm() < 1e-13);
    }

    #[test]
    fn r_plus_sl2_resolvent_value() {
        // R_+(q) E = (1 - e^{-2})^{-1} E
        let spec = sl2_trig();
        let rp = eval_r_plus(&spec, &q_one()).unwrap();
        let e = e_vec(&spec);
        let want = &e / (1.0 - f64::exp(-2.0));
        assert!((&rp.matrix * &e - want).norm() < 1e-13);
    }

    #[test]
    fn nabla_r_analytic_sl2() {
        // along kappa = H: -(phi(kappa)/4) sinh^{-2}(phi(q)/2) on E
        let spec = sl2_trig();
        let kappa = CoeffVec::from_vec(vec![1.0]);
        let grad = nabla_r(&spec, &q_one(), &kappa).unwrap();
        let e = e_vec(&spec);
        let s = f64::sinh(1.0);
        let want = &e * (-0.5 / (s * s));
        assert!((&grad * &e - want).norm() < 1e-13);
    }

    #[test]
    fn nabla_r_matches_fd() {
        for spec in [sl2_trig(), sl2_rational()] {
            let kappa = CoeffVec::from_vec(vec![0.7]);
            let analytic = nabla_r(&spec, &q_one(), &kappa).unwrap();
            let fd = nabla_r_fd(&spec, &q_one(), &kappa).unwrap();
            assert!((analytic - fd).norm() < 1e-7);
        }
    }

    #[test]
    fn nabla_r_rational_value() {
        // -(phi(kappa)/phi(q)^2) on E
        let spec = sl2_rational();
        let kappa = CoeffVec::from_vec(vec![1.0]);
        let grad = nabla_r(&spec, &q_one(), &kappa).unwrap();
        let e = e_vec(&spec);
        assert!((&grad * &e + &e * 0.5).norm() < 1e-14);
    }

    #[test]
    fn nabla_r_linear_in_direction() {
        let spec = sl2_trig();
        let zero = CoeffVec::zeros(1);
        let grad = nabla_r(&spec, &q_one(), &zero).unwrap();
        assert!(grad.norm() < 1e-15);
    }

    #[test]
    fn cdybe_residual_small_for_both_kinds() {
        let mut rng = ChaCha12Rng::seed_from_u64(11);
        for spec in [sl2_trig(), sl2_rational()] {
            for _ in 0..20 {
                let q = sample_regular_q(&spec, &mut rng, 1.2);
                let x = CoeffVec::from_fn(spec.model.dim, |_, _| rng.gen_range(-1.0..1.0));
                let y = CoeffVec::from_fn(spec.model.dim, |_, _| rng.gen_range(-1.0..1.0));
                let res = cdybe_residual(&spec, &q, &x, &y).unwrap();
                assert!(res.norm() < 1e-8, "CDYBE residual {:.2e}", res.norm());
            }
        }
    }

    #[test]
    fn cdybe_residual_vanishes_for_equal_arguments() {
        let spec = sl2_trig();
        let mut rng = ChaCha12Rng::seed_from_u64(5);
        let q = sample_regular_q(&spec, &mut rng, 1.0);
        let x = CoeffVec::from_fn(spec.model.dim, |_, _| rng.gen_range(-1.0..1.0));
        let res = cdybe_residual(&spec, &q, &x, &x).unwrap();
        assert!(res.norm() < 1e-13);
    }

    #[test]
    fn cayley_is_minus_identity_on_k() {
        let spec = sl2_trig();
        let (_, report) = cayley(&spec, &q_one()).unwrap();
        assert!(report.k_block_residual < 1e-12);
        assert!(report.perp_block_residual < 1e-11);
    }

    #[test]
    fn cayley_orthogonal_on_compact_form() {
        let built = build_model(Family::A, 1, RealForm::Compact).unwrap();
        let theta = Arc::new(Automorphism::identity(&built.model));
        let spec =
            RMatrixSpec::trigonometric(built.model.clone(), built.cartan_split, theta).unwrap();
        let mut rng = ChaCha12Rng::seed_from_u64(3);
        let q = sample_regular_q(&spec, &mut rng, 1.0);
        let (c, report) = cayley(&spec, &q).unwrap();
        assert!(report.k_block_residual < 1e-12);
        assert!(report.perp_block_residual < 1e-11);
        for _ in 0..10 {
            let x = CoeffVec::from_fn(spec.model.dim, |_, _| rng.gen_range(-1.0..1.0));
            let y = CoeffVec::from_fn(spec.model.dim, |_, _| rng.gen_range(-1.0..1.0));
            let lhs = spec.model.pairing(&(&c * &x), &(&c * &y));
            let rhs = spec.model.pairing(&x, &y);
            assert!((lhs - rhs).abs() < 1e-12);
        }
    }

    #[test]
    fn compact_shift_property() {
        // R(q + v) equals the r-matrix rebuilt with theta' = exp(ad_v)
        let built = build_model(Family::A, 2, RealForm::Compact).unwrap();
        let theta = Arc::new(Automorphism::identity(&built.model));
        let spec =
            RMatrixSpec::trigonometric(built.model.clone(), built.cartan_split.clone(), theta)
                .unwrap();
        let mut rng = ChaCha12Rng::seed_from_u64(17);
        let q = sample_regular_q(&spec, &mut rng, 0.6);
        let v = CoeffVec::from_fn(spec.rank(), |_, _| rng.gen_range(-0.3..0.3));
        let v_full = spec.split.from_k_coords(&v);
        let theta_v = Arc::new(inner_exp_automorphism(&built.model, &v_full).unwrap());
        let shifted =
            RMatrixSpec::trigonometric(built.model.clone(), built.cartan_split.clone(), theta_v)
                .unwrap();
        let lhs = eval_r(&spec, &(&q + &v)).unwrap().matrix;
        let rhs = eval_r(&shifted, &q).unwrap().matrix;
        assert!((lhs - rhs).norm() < 1e-11);
    }

    #[test]
    fn antisymmetry_and_k_compatibility_random_points() {
        let built = build_model(Family::A, 2, RealForm::Split).unwrap();
        let theta = Arc::new(Automorphism::identity(&built.model));
        let spec =
            RMatrixSpec::trigonometric(built.model.clone(), built.cartan_split, theta).unwrap();
        let mut rng = ChaCha12Rng::seed_from_u64(23);
        let gram = &spec.model.gram;
        for _ in 0..50 {
            let q = sample_regular_q(&spec, &mut rng, 1.5);
            let r = eval_r(&spec, &q).unwrap().matrix;
            // antisymmetry w.r.t. the pairing: R^T G + G R = 0
            let anti = r.transpose() * gram + gram * &r;
            assert!(
                anti.norm() < 1e-11,
                "antisymmetry residual {:.2e}",
                anti.norm()
            );
            // maps K-perp to K-perp and kills K
            assert!((&spec.split.p_k * &r).norm() < 1e-11);
            assert!((&r * &spec.split.b_k).norm() < 1e-12);
        }
    }

    #[test]
    fn equivariance_commutes_with_ad_k() {
        let built = build_model(Family::A, 2, RealForm::Split).unwrap();
        let theta = Arc::new(Automorphism::identity(&built.model));
        let spec =
            RMatrixSpec::trigonometric(built.model.clone(), built.cartan_split, theta).unwrap();
        let mut rng = ChaCha12Rng::seed_from_u64(31);
        let q = sample_regular_q(&spec, &mut rng, 1.2);
        let r = eval_r(&spec, &q).unwrap().matrix;
        for kappa in &spec.split.k_basis {
            let ad_k = spec.model.ad_op(kappa);
            let comm = &ad_k * &r - &r * &ad_k;
            assert!(comm.norm() < 1e-11);
        }
    }

    #[test]
    fn singular_wall_is_reported() {
        let spec = sl2_trig();
        let q = CoeffVec::from_vec(vec![1e-12]); // phi(q) ~ 0: on the wall
        match eval_r(&spec, &q) {
            Err(Error::Singular { sigma, .. }) => assert!(sigma < 1e-8),
            other => panic!("expected singularity error, got {other:?}"),
        }
    }
}
