//! Roots and weights as integer coordinate functionals.

use crate::{Realization, C64};
use std::collections::HashMap;
use std::fmt;

/// A root (or weight) as an integer vector of coefficients over the leading
/// diagonal slots of the matrix realization: for `A_n` the epsilon
/// functionals on `diag(Q_1, ..., Q_{n+1})`, for `D_n` and the folded Cartans
/// the `e_k` functionals reading the first `len` diagonal entries.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Root(pub Vec<i32>);

impl Root {
    pub fn neg(&self) -> Root {
        Root(self.0.iter().map(|c| -c).collect())
    }

    /// Evaluate the functional on a realized Cartan element.
    pub fn eval(&self, m: &Realization) -> C64 {
        let mut acc = C64::new(0.0, 0.0);
        for (k, &c) in self.0.iter().enumerate() {
            if c != 0 {
                acc += C64::new(c as f64, 0.0) * m[(k, k)];
            }
        }
        acc
    }

    /// True when the first non-zero coefficient is positive.
    pub fn is_positive(&self) -> bool {
        for &c in &self.0 {
            if c != 0 {
                return c > 0;
            }
        }
        false
    }
}

impl fmt::Display for Root {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut first = true;
        for (k, &c) in self.0.iter().enumerate() {
            if c == 0 {
                continue;
            }
            if c > 0 && !first {
                write!(f, "+")?;
            }
            match c {
                1 => write!(f, "e{}", k + 1)?,
                -1 => write!(f, "-e{}", k + 1)?,
                _ => write!(f, "{}e{}", c, k + 1)?,
            }
            first = false;
        }
        if first {
            write!(f, "0")?;
        }
        Ok(())
    }
}

/// Cartan and root-space data attached to a model.
#[derive(Debug, Clone)]
pub struct RootSystemData {
    /// Model-basis indices of the Cartan subalgebra elements.
    pub cartan_idx: Vec<usize>,
    pub simple: Vec<Root>,
    pub positive: Vec<Root>,
    /// Normalized Chevalley root vectors `X_phi` of the complexification,
    /// for phi in `positive` and their negatives.
    pub chevalley: HashMap<Root, Realization>,
    /// Split form: model-basis index of `X_phi` for phi and -phi.
    pub split_x_idx: HashMap<Root, usize>,
    /// Compact form: model-basis indices of the pair `(Y_phi, Z_phi)`
    /// for each positive root.
    pub yz_idx: HashMap<Root, (usize, usize)>,
}

impl RootSystemData {
    pub fn all_roots(&self) -> impl Iterator<Item = Root> + '_ {
        self.positive
            .iter()
            .cloned()
            .chain(self.positive.iter().map(|r| r.neg()))
    }
}
