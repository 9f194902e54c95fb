//! Matrix realizations of self-dual Lie algebras with Chevalley bases,
//! invariant pairings, subalgebra splits, automorphisms and diagram folding.
//!
//! Elements are stored as real coefficient vectors over a fixed basis of
//! complex realization matrices; the "real form" is enforced by expansion
//! residue checks rather than by separate storage for split and compact
//! cases. The pairing is the trace form of the defining representation,
//! with root vectors normalized so that `<X_phi, X_{-phi}> = 1`.

mod automorphism;
mod build;
mod fold;
mod roots;
mod split;

pub use automorphism::{
    diagram_automorphism, inner_exp_automorphism, label_name, AutKind, Automorphism,
    RealizationAction,
};
pub use build::{build_direct_sum, build_model, BuiltModel, Family, RealForm};
pub use fold::{fold, FoldedData, FoldedVector};
pub use roots::{Root, RootSystemData};
pub use split::SubalgebraSplit;

use crate::error::{Error, Result};
use crate::{CoeffVec, OpMatrix, Realization, C64};

/// How a basis element of the model was constructed.
#[derive(Debug, Clone, PartialEq)]
pub enum BasisLabel {
    /// Cartan generator `T_k` (split) or `i T_k` (compact).
    Cartan(usize),
    /// Root vector `X_phi` of the split form.
    Root(Root),
    /// Compact generator `Y_phi = (i/sqrt2)(X_phi + X_{-phi})`.
    CompactY(Root),
    /// Compact generator `Z_phi = (1/sqrt2)(X_phi - X_{-phi})`.
    CompactZ(Root),
    /// Basis element of the j-th summand of a direct sum.
    Copy(usize, Box<BasisLabel>),
}

/// A self-dual Lie algebra in a fixed matrix realization.
#[derive(Debug, Clone)]
pub struct LieAlgebraModel {
    pub name: String,
    pub family: Family,
    pub form: RealForm,
    /// Rank of the simple factor (full Cartan dimension).
    pub rank: usize,
    /// Real dimension of the algebra.
    pub dim: usize,
    /// Size of the realization matrices.
    pub mat_size: usize,
    /// Number of direct summands (1 for a simple algebra).
    pub copies: usize,
    pub basis: Vec<Realization>,
    pub labels: Vec<BasisLabel>,
    /// Ratio between the Killing form and the stored trace-form pairing
    /// (2m for sl(m), 2n-2 for so(2n)).
    pub killing_scale: f64,
    /// Pairing matrix `<T_a, T_b>` (trace form of the defining realization;
    /// the Killing form is `killing_scale` times this pairing).
    pub gram: OpMatrix,
    pub gram_inv: OpMatrix,
    /// Dual basis realizations `T^a`.
    pub dual: Vec<Realization>,
    /// `ad[a]` is the matrix of `ad_{T_a}` on coefficient vectors,
    /// i.e. `ad[a][(c, b)] = f_{ab}^c`.
    pub ad: Vec<OpMatrix>,
    pub roots: RootSystemData,
}

impl LieAlgebraModel {
    pub fn zero(&self) -> CoeffVec {
        CoeffVec::zeros(self.dim)
    }

    /// Coefficient vector with a single basis component.
    pub fn basis_elem(&self, a: usize) -> CoeffVec {
        let mut v = self.zero();
        v[a] = 1.0;
        v
    }

    /// Invariant pairing of two elements.
    pub fn pairing(&self, x: &CoeffVec, y: &CoeffVec) -> f64 {
        (x.transpose() * &self.gram * y)[(0, 0)]
    }

    /// Norm induced by the coefficient vector (Euclidean; the gram form may
    /// be indefinite on split forms).
    pub fn coeff_norm(&self, x: &CoeffVec) -> f64 {
        x.norm()
    }

    /// Matrix of `ad_x` acting on coefficient vectors.
    pub fn ad_op(&self, x: &CoeffVec) -> OpMatrix {
        let mut acc = OpMatrix::zeros(self.dim, self.dim);
        for (a, c) in x.iter().enumerate() {
            if *c != 0.0 {
                acc += &self.ad[a] * *c;
            }
        }
        acc
    }

    /// Lie bracket `[x, y]` in coefficients.
    pub fn bracket(&self, x: &CoeffVec, y: &CoeffVec) -> CoeffVec {
        let mut acc = CoeffVec::zeros(self.dim);
        for (a, c) in x.iter().enumerate() {
            if *c != 0.0 {
                acc += &self.ad[a] * y * *c;
            }
        }
        acc
    }

    /// Structure constant `f_{ab}^c`.
    pub fn f(&self, a: usize, b: usize, c: usize) -> f64 {
        self.ad[a][(c, b)]
    }

    /// Realize a coefficient vector as a matrix.
    pub fn realize(&self, x: &CoeffVec) -> Realization {
        let mut acc = Realization::zeros(self.mat_size, self.mat_size);
        for (a, c) in x.iter().enumerate() {
            if *c != 0.0 {
                acc += &self.basis[a] * C64::new(*c, 0.0);
            }
        }
        acc
    }

    /// Expand a realization matrix over the model basis, enforcing
    /// membership in the real form.
    pub fn expand(&self, m: &Realization) -> Result<CoeffVec> {
        let (coeffs, residue) = self.expand_lossy(m);
        let scale = 1.0 + coeffs.norm();
        if residue > 1e-8 * scale {
            return Err(Error::RealFormViolation(residue));
        }
        Ok(coeffs)
    }

    /// Expansion together with the residue (imaginary parts plus the
    /// component outside the basis span).
    pub fn expand_lossy(&self, m: &Realization) -> (CoeffVec, f64) {
        let mut coeffs = CoeffVec::zeros(self.dim);
        let mut imag = 0.0_f64;
        for a in 0..self.dim {
            let c = crate::linalg::trace_prod(m, &self.dual[a]);
            coeffs[a] = c.re;
            imag = imag.max(c.im.abs());
        }
        let recon = self.realize(&coeffs);
        let off_span = (m - recon).norm();
        (coeffs, imag.max(off_span))
    }

    /// Pairing evaluated directly on realization matrices.
    pub fn pairing_mats(&self, x: &Realization, y: &Realization) -> C64 {
        crate::linalg::trace_prod(x, y)
    }

    /// Chevalley automorphism `sigma(X) = -X^T` of the realization.
    pub fn chevalley_sigma(&self, m: &Realization) -> Realization {
        -m.transpose()
    }

    /// Indices of the full-Cartan basis elements.
    pub fn cartan_indices(&self) -> &[usize] {
        &self.roots.cartan_idx
    }
}

#[cfg(test)]
mod tests;
