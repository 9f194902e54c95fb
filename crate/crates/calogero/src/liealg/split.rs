//! Orthogonal decomposition G = K + K-perp with projector and
//! restricted-operator machinery.

use super::LieAlgebraModel;
use crate::error::{Error, Result};
use crate::{CoeffVec, OpMatrix};

/// The split of the algebra along a self-dual Abelian subalgebra K.
///
/// Bases are stored as coefficient vectors over the parent model basis; they
/// need not be orthonormal, only orthogonal between K and K-perp.
#[derive(Debug, Clone)]
pub struct SubalgebraSplit {
    pub dim: usize,
    pub k_basis: Vec<CoeffVec>,
    pub perp_basis: Vec<CoeffVec>,
    /// dim x r matrix stacking the K basis.
    pub b_k: OpMatrix,
    /// dim x (dim - r) matrix stacking the K-perp basis.
    pub b_perp: OpMatrix,
    /// Gram-orthogonal projectors onto K and K-perp.
    pub p_k: OpMatrix,
    pub p_perp: OpMatrix,
    pub gram_k: OpMatrix,
    pub gram_k_inv: OpMatrix,
    /// r x dim map v -> K-coordinates of the K-component of v.
    pub k_extract: OpMatrix,
    /// (dim - r) x dim analogue for K-perp.
    pub perp_extract: OpMatrix,
    /// Dual basis `T^i` of K (as full coefficient vectors).
    pub k_dual: Vec<CoeffVec>,
}

impl SubalgebraSplit {
    pub fn new(
        model: &LieAlgebraModel,
        k_basis: Vec<CoeffVec>,
        perp_basis: Vec<CoeffVec>,
    ) -> Result<Self> {
        let dim = model.dim;
        let r = k_basis.len();
        let d_perp = perp_basis.len();
        if r + d_perp != dim {
            return Err(Error::DimensionMismatch(format!(
                "split bases span {} of {} dimensions",
                r + d_perp,
                dim
            )));
        }
        for (i, ki) in k_basis.iter().enumerate() {
            for kj in k_basis.iter().skip(i + 1) {
                if model.bracket(ki, kj).norm() > 1e-12 {
                    return Err(Error::Construction("K basis is not Abelian".into()));
                }
            }
            for pj in &perp_basis {
                if model.pairing(ki, pj).abs() > 1e-10 {
                    return Err(Error::Construction(
                        "K and K-perp bases are not orthogonal".into(),
                    ));
                }
            }
        }

        let b_k = OpMatrix::from_columns(&k_basis.to_vec());
        let b_perp = OpMatrix::from_columns(&perp_basis.to_vec());
        let gram_k = b_k.transpose() * &model.gram * &b_k;
        let gram_k_inv = gram_k.clone().try_inverse().ok_or_else(|| {
            Error::Construction("pairing restricted to K is not invertible".into())
        })?;
        let gram_perp = b_perp.transpose() * &model.gram * &b_perp;
        let gram_perp_inv = gram_perp.clone().try_inverse().ok_or_else(|| {
            Error::Construction("pairing restricted to K-perp is not invertible".into())
        })?;

        let k_extract = &gram_k_inv * b_k.transpose() * &model.gram;
        let perp_extract = &gram_perp_inv * b_perp.transpose() * &model.gram;
        let p_k = &b_k * &k_extract;
        let p_perp = &b_perp * &perp_extract;

        let id = OpMatrix::identity(dim, dim);
        if (&p_k + &p_perp - id).norm() > 1e-10 {
            return Err(Error::Construction(
                "projectors do not resolve the identity".into(),
            ));
        }

        let k_dual: Vec<CoeffVec> = (0..r).map(|i| &b_k * gram_k_inv.column(i)).collect();

        Ok(SubalgebraSplit {
            dim,
            k_basis,
            perp_basis,
            b_k,
            b_perp,
            p_k,
            p_perp,
            gram_k,
            gram_k_inv,
            k_extract,
            perp_extract,
            k_dual,
        })
    }

    pub fn rank(&self) -> usize {
        self.k_basis.len()
    }

    pub fn perp_dim(&self) -> usize {
        self.perp_basis.len()
    }

    /// K-coordinates (w.r.t. the K basis) of the K-component of v.
    pub fn k_coords(&self, v: &CoeffVec) -> CoeffVec {
        &self.k_extract * v
    }

    pub fn perp_coords(&self, v: &CoeffVec) -> CoeffVec {
        &self.perp_extract * v
    }

    /// Full coefficient vector of an element given in K-coordinates.
    pub fn from_k_coords(&self, qc: &CoeffVec) -> CoeffVec {
        &self.b_k * qc
    }

    pub fn from_perp_coords(&self, c: &CoeffVec) -> CoeffVec {
        &self.b_perp * c
    }

    /// Orthogonal decomposition X = X_K + X_perp.
    pub fn project(&self, v: &CoeffVec) -> (CoeffVec, CoeffVec) {
        (&self.p_k * v, &self.p_perp * v)
    }

    /// Restrict an operator (that maps K-perp into itself) to the K-perp
    /// block in the chosen basis.
    pub fn restrict_perp(&self, op: &OpMatrix) -> OpMatrix {
        &self.perp_extract * op * &self.b_perp
    }

    /// Restrict an operator to the K block.
    pub fn restrict_k(&self, op: &OpMatrix) -> OpMatrix {
        &self.k_extract * op * &self.b_k
    }

    /// Embed a K-perp block operator back into the full space (zero on K).
    pub fn embed_perp(&self, block: &OpMatrix) -> OpMatrix {
        &self.b_perp * block * &self.perp_extract
    }
}
