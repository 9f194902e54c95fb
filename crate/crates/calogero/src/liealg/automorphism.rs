//! Scalar-product-preserving automorphisms and their group lifts.

use super::roots::Root;
use super::{BasisLabel, LieAlgebraModel};
use crate::error::{Error, Result};
use crate::linalg::expm_real;
use crate::{CoeffVec, OpMatrix, Realization, C64};

/// Action of the automorphism on realization matrices. The same action
/// serves the algebra (conjugation-like formulas applied to algebra
/// elements) and, through [`RealizationAction::apply_group`], the group.
#[derive(Debug, Clone)]
pub enum RealizationAction {
    Identity,
    /// theta(X) = u X u^{-1}
    Conjugation {
        u: Realization,
        u_inv: Realization,
    },
    /// theta(X) = -s X^T s^{-1} (outer automorphism of sl(m));
    /// on the group: g -> s (g^T)^{-1} s^{-1}.
    NegTransposeSim {
        s: Realization,
        s_inv: Realization,
    },
    /// Block cyclic shift with an inner twist:
    /// theta(u_1, ..., u_N) = (tau u_N, tau u_1, ..., tau u_{N-1}).
    CyclicBlocks {
        copies: usize,
        block: usize,
        inner: Box<RealizationAction>,
    },
}

impl RealizationAction {
    /// Apply to an algebra element realization.
    pub fn apply_alg(&self, x: &Realization) -> Realization {
        match self {
            RealizationAction::Identity => x.clone(),
            RealizationAction::Conjugation { u, u_inv } => u * x * u_inv,
            RealizationAction::NegTransposeSim { s, s_inv } => -(s * x.transpose() * s_inv),
            RealizationAction::CyclicBlocks {
                copies,
                block,
                inner,
            } => {
                let n = *block;
                let mut out = Realization::zeros(x.nrows(), x.ncols());
                for j in 0..*copies {
                    let src = (j + copies - 1) % copies;
                    let piece = x.view((src * n, src * n), (n, n)).clone_owned();
                    out.view_mut((j * n, j * n), (n, n))
                        .copy_from(&inner.apply_alg(&piece));
                }
                out
            }
        }
    }

    pub fn apply_alg_inv(&self, x: &Realization) -> Realization {
        match self {
            RealizationAction::Identity => x.clone(),
            RealizationAction::Conjugation { u, u_inv } => u_inv * x * u,
            // involutive for the similarity matrices used here
            RealizationAction::NegTransposeSim { .. } => self.apply_alg(x),
            RealizationAction::CyclicBlocks {
                copies,
                block,
                inner,
            } => {
                let n = *block;
                let mut out = Realization::zeros(x.nrows(), x.ncols());
                for j in 0..*copies {
                    let src = (j + 1) % copies;
                    let piece = x.view((src * n, src * n), (n, n)).clone_owned();
                    out.view_mut((j * n, j * n), (n, n))
                        .copy_from(&inner.apply_alg_inv(&piece));
                }
                out
            }
        }
    }

    /// Group lift applied to a realization of a group element.
    pub fn apply_group(&self, g: &Realization) -> Result<Realization> {
        Ok(match self {
            RealizationAction::Identity => g.clone(),
            RealizationAction::Conjugation { u, u_inv } => u * g * u_inv,
            RealizationAction::NegTransposeSim { s, s_inv } => {
                let g_inv = g
                    .clone()
                    .try_inverse()
                    .ok_or_else(|| Error::Construction("group element not invertible".into()))?;
                s * g_inv.transpose() * s_inv
            }
            RealizationAction::CyclicBlocks {
                copies,
                block,
                inner,
            } => {
                let n = *block;
                let mut out = Realization::zeros(g.nrows(), g.ncols());
                for j in 0..*copies {
                    let src = (j + copies - 1) % copies;
                    let piece = g.view((src * n, src * n), (n, n)).clone_owned();
                    out.view_mut((j * n, j * n), (n, n))
                        .copy_from(&inner.apply_group(&piece)?);
                }
                out
            }
        })
    }

    pub fn apply_group_inv(&self, g: &Realization) -> Result<Realization> {
        Ok(match self {
            RealizationAction::Identity => g.clone(),
            RealizationAction::Conjugation { u, u_inv } => u_inv * g * u,
            RealizationAction::NegTransposeSim { .. } => self.apply_group(g)?,
            RealizationAction::CyclicBlocks {
                copies,
                block,
                inner,
            } => {
                let n = *block;
                let mut out = Realization::zeros(g.nrows(), g.ncols());
                for j in 0..*copies {
                    let src = (j + 1) % copies;
                    let piece = g.view((src * n, src * n), (n, n)).clone_owned();
                    out.view_mut((j * n, j * n), (n, n))
                        .copy_from(&inner.apply_group_inv(&piece)?);
                }
                out
            }
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum AutKind {
    Trivial,
    Diagram,
    InnerExp,
    Cyclic(usize),
}

/// A scalar-product-preserving automorphism with its operator matrix in the
/// model basis and the group lift.
#[derive(Debug, Clone)]
pub struct Automorphism {
    pub op: OpMatrix,
    /// Finite order when known (`None` for generic inner exponentials).
    pub order: Option<usize>,
    pub action: RealizationAction,
    pub kind: AutKind,
}

impl Automorphism {
    pub fn identity(model: &LieAlgebraModel) -> Automorphism {
        Automorphism {
            op: OpMatrix::identity(model.dim, model.dim),
            order: Some(1),
            action: RealizationAction::Identity,
            kind: AutKind::Trivial,
        }
    }

    pub fn apply(&self, v: &CoeffVec) -> CoeffVec {
        &self.op * v
    }

    /// Derive the coefficient-space operator from the realization action.
    pub fn op_from_action(model: &LieAlgebraModel, action: &RealizationAction) -> Result<OpMatrix> {
        let mut op = OpMatrix::zeros(model.dim, model.dim);
        for a in 0..model.dim {
            let image = action.apply_alg(&model.basis[a]);
            let coeffs = model.expand(&image)?;
            op.set_column(a, &coeffs);
        }
        Ok(op)
    }
}

/// The non-trivial involutive diagram automorphism of `A_n` (n >= 2) or
/// `D_n`, in its matrix form on the realization.
pub fn diagram_automorphism(model: &LieAlgebraModel) -> Result<Automorphism> {
    if model.copies != 1 {
        return Err(Error::Unsupported(
            "diagram automorphism of a direct sum is not supported".into(),
        ));
    }
    let m = model.mat_size;
    let action = match model.family {
        super::Family::A => {
            if model.rank < 2 {
                return Err(Error::Unsupported(
                    "A_1 has no non-trivial diagram symmetry".into(),
                ));
            }
            // s = J D with J the anti-diagonal and D = diag((-1)^row).
            let mut s = Realization::zeros(m, m);
            for i in 0..m {
                let sign = if (i + 1) % 2 == 0 { 1.0 } else { -1.0 };
                s[(i, m - 1 - i)] = C64::new(sign, 0.0);
            }
            let s_inv = s.clone().try_inverse().unwrap();
            RealizationAction::NegTransposeSim { s, s_inv }
        }
        super::Family::D => {
            // swap the middle coordinate pair: e_n -> -e_n
            let n = model.rank;
            let mut u = Realization::identity(m, m);
            u[(n - 1, n - 1)] = C64::new(0.0, 0.0);
            u[(n, n)] = C64::new(0.0, 0.0);
            u[(n - 1, n)] = C64::new(1.0, 0.0);
            u[(n, n - 1)] = C64::new(1.0, 0.0);
            let u_inv = u.clone();
            RealizationAction::Conjugation { u, u_inv }
        }
    };

    // Defining property on the simple-root vectors:
    // tau(X_{+-phi_k}) = X_{+-tau(phi_k)} exactly.
    let n_simple = model.roots.simple.len();
    for (k, phi) in model.roots.simple.iter().enumerate() {
        let tau_k = diagram_simple_image(model, k);
        let expected = &model.roots.simple[tau_k];
        for (root, target) in [(phi.clone(), expected.clone()), (phi.neg(), expected.neg())] {
            let x = &model.roots.chevalley[&root];
            let image = action.apply_alg(x);
            let want = &model.roots.chevalley[&target];
            if (&image - want).norm() > 1e-12 {
                return Err(Error::Construction(format!(
                    "diagram automorphism failed on simple root {} of {} (dev {:.2e})",
                    k,
                    n_simple,
                    (&image - want).norm()
                )));
            }
        }
    }

    let op = Automorphism::op_from_action(model, &action)?;
    Ok(Automorphism {
        op,
        order: Some(2),
        action,
        kind: AutKind::Diagram,
    })
}

/// Index of the image of the k-th simple root under the diagram symmetry.
fn diagram_simple_image(model: &LieAlgebraModel, k: usize) -> usize {
    match model.family {
        super::Family::A => model.rank - 1 - k,
        super::Family::D => {
            let n = model.rank;
            if k == n - 2 {
                n - 1
            } else if k == n - 1 {
                n - 2
            } else {
                k
            }
        }
    }
}

/// The inner automorphism `exp(ad_v)` for `v` in K, lifted to conjugation
/// by `exp(v)` on the group. Fixes K pointwise when K is Abelian and
/// preserves the scalar product.
pub fn inner_exp_automorphism(model: &LieAlgebraModel, v: &CoeffVec) -> Result<Automorphism> {
    let op = expm_real(&model.ad_op(v));
    let u = crate::linalg::expm(&model.realize(v));
    let u_inv = u
        .clone()
        .try_inverse()
        .ok_or_else(|| Error::Construction("exp(v) not invertible".into()))?;
    Ok(Automorphism {
        op,
        order: None,
        action: RealizationAction::Conjugation { u, u_inv },
        kind: AutKind::InnerExp,
    })
}

/// Label-aware display name of a basis element (used by `describe`).
pub fn label_name(label: &BasisLabel) -> String {
    match label {
        BasisLabel::Cartan(k) => format!("T{}", k + 1),
        BasisLabel::Root(r) => format!("X[{r}]"),
        BasisLabel::CompactY(r) => format!("Y[{r}]"),
        BasisLabel::CompactZ(r) => format!("Z[{r}]"),
        BasisLabel::Copy(j, inner) => format!("({})#{}", label_name(inner), j + 1),
    }
}

/// Image of a root under the diagram symmetry, computed numerically from the
/// action on the root vector (used by the folding procedure).
pub(crate) fn root_image(
    model: &LieAlgebraModel,
    action: &RealizationAction,
    phi: &Root,
) -> Result<(Root, f64)> {
    let x = &model.roots.chevalley[phi];
    let image = action.apply_alg(x);
    for psi in model.roots.all_roots() {
        let candidate = &model.roots.chevalley[&psi];
        // c = <tau(X_phi), X_{-psi}> since <X_psi, X_{-psi}> = 1
        let c = model.pairing_mats(&image, &model.roots.chevalley[&psi.neg()]);
        if c.norm() > 0.5 {
            let dev = (&image - candidate * c).norm();
            if dev < 1e-10 {
                if c.im.abs() > 1e-12 {
                    return Err(Error::Construction(format!(
                        "complex c_phi = {c} for root {phi}"
                    )));
                }
                return Ok((psi, c.re));
            }
        }
    }
    Err(Error::Construction(format!(
        "automorphism does not permute the root spaces at {phi}"
    )))
}
