//! Construction of the supported algebra families.
//!
//! `A_n` is realized as sl(n+1) with elementary-matrix root vectors;
//! `D_n` as so(2n) relative to the anti-diagonal symmetric form, so that the
//! Cartan subalgebra is diagonal in both cases. Compact real forms are the
//! real spans of `i T_k` together with `Y_phi, Z_phi`.

use super::roots::{Root, RootSystemData};
use super::split::SubalgebraSplit;
use super::{BasisLabel, LieAlgebraModel};
use crate::error::{Error, Result};
use crate::{CoeffVec, OpMatrix, Realization, C64};
use serde::{Deserialize, Serialize};
use std::collections::HashMap;
use std::sync::Arc;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Family {
    A,
    D,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum RealForm {
    Split,
    Compact,
}

/// A model together with the split along its full Cartan subalgebra.
#[derive(Debug, Clone)]
pub struct BuiltModel {
    pub model: Arc<LieAlgebraModel>,
    pub cartan_split: Arc<SubalgebraSplit>,
}

fn elementary(n: usize, i: usize, j: usize) -> Realization {
    let mut m = Realization::zeros(n, n);
    m[(i, j)] = C64::new(1.0, 0.0);
    m
}

/// Raw (unnormalized) Chevalley data for one family: simple roots and
/// positive roots with raw positive root vectors.
struct RawChevalley {
    simple: Vec<Root>,
    positive: Vec<(Root, Realization)>,
    mat_size: usize,
}

fn raw_a(rank: usize) -> RawChevalley {
    let m = rank + 1;
    let mut positive = Vec::new();
    for a in 0..m {
        for b in (a + 1)..m {
            let mut v = vec![0i32; m];
            v[a] = 1;
            v[b] = -1;
            positive.push((Root(v), elementary(m, a, b)));
        }
    }
    positive.sort_by(|x, y| x.0.cmp(&y.0));
    let simple = (0..rank)
        .map(|k| {
            let mut v = vec![0i32; m];
            v[k] = 1;
            v[k + 1] = -1;
            Root(v)
        })
        .collect();
    RawChevalley {
        simple,
        positive,
        mat_size: m,
    }
}

fn raw_d(rank: usize) -> RawChevalley {
    let n = rank;
    let m = 2 * n;
    let bar = |k: usize| m - 1 - k; // 0-based mirror index
    let mut positive = Vec::new();
    for k in 0..n {
        for l in (k + 1)..n {
            // e_k - e_l
            let mut v = vec![0i32; n];
            v[k] = 1;
            v[l] = -1;
            positive.push((Root(v), elementary(m, k, l) - elementary(m, bar(l), bar(k))));
            // e_k + e_l
            let mut v = vec![0i32; n];
            v[k] = 1;
            v[l] = 1;
            positive.push((Root(v), elementary(m, k, bar(l)) - elementary(m, l, bar(k))));
        }
    }
    positive.sort_by(|x, y| x.0.cmp(&y.0));
    let mut simple: Vec<Root> = (0..n - 1)
        .map(|k| {
            let mut v = vec![0i32; n];
            v[k] = 1;
            v[k + 1] = -1;
            Root(v)
        })
        .collect();
    let mut v = vec![0i32; n];
    v[n - 2] = 1;
    v[n - 1] = 1;
    simple.push(Root(v));
    RawChevalley {
        simple,
        positive,
        mat_size: m,
    }
}

/// Normalize the raw root vectors so that `<X_phi, X_{-phi}> = 1` with
/// `X_{-phi} = X_phi^T` (i.e. `-sigma(X_phi)`).
fn normalized_chevalley(raw: &RawChevalley) -> Result<HashMap<Root, Realization>> {
    let mut map = HashMap::new();
    for (root, x_raw) in &raw.positive {
        let norm2 = (x_raw * x_raw.transpose()).trace();
        if norm2.im.abs() > 1e-12 || norm2.re <= 0.0 {
            return Err(Error::Construction(format!(
                "root vector normalization failed for {root}"
            )));
        }
        let x = x_raw * C64::new(1.0 / norm2.re.sqrt(), 0.0);
        let x_neg = x.transpose();
        let check = (&x * &x_neg).trace();
        if (check - C64::new(1.0, 0.0)).norm() > 1e-12 {
            return Err(Error::Construction(format!(
                "<X_phi, X_-phi> = {} != 1 for {root}",
                check
            )));
        }
        map.insert(root.clone(), x);
        map.insert(root.neg(), x_neg);
    }
    Ok(map)
}

fn family_name(family: Family, rank: usize, form: RealForm) -> String {
    let f = match family {
        Family::A => "A",
        Family::D => "D",
    };
    let fm = match form {
        RealForm::Split => "split",
        RealForm::Compact => "compact",
    };
    format!("{f}{rank}-{fm}")
}

/// Build a model of the given family, rank and real form, together with the
/// split along its full Cartan subalgebra.
pub fn build_model(family: Family, rank: usize, form: RealForm) -> Result<BuiltModel> {
    let raw = match family {
        Family::A => {
            if !(1..=8).contains(&rank) {
                return Err(Error::Unsupported(format!(
                    "A_n supported for 1 <= n <= 8, got n={rank}"
                )));
            }
            raw_a(rank)
        }
        Family::D => {
            if !(3..=6).contains(&rank) {
                return Err(Error::Unsupported(format!(
                    "D_n supported for 3 <= n <= 6, got n={rank}"
                )));
            }
            raw_d(rank)
        }
    };
    let chevalley = normalized_chevalley(&raw)?;

    // Cartan basis: T_{phi_k} = [X_{phi_k}, X_{-phi_k}] for the simple roots.
    let coroots: Vec<Realization> = raw
        .simple
        .iter()
        .map(|phi| {
            let x = &chevalley[phi];
            let y = &chevalley[&phi.neg()];
            x * y - y * x
        })
        .collect();

    let i_c = C64::new(0.0, 1.0);
    let mut basis: Vec<Realization> = Vec::new();
    let mut labels: Vec<BasisLabel> = Vec::new();
    let mut split_x_idx = HashMap::new();
    let mut yz_idx = HashMap::new();

    match form {
        RealForm::Split => {
            for (k, t) in coroots.iter().enumerate() {
                basis.push(t.clone());
                labels.push(BasisLabel::Cartan(k));
            }
            for (root, _) in &raw.positive {
                split_x_idx.insert(root.clone(), basis.len());
                basis.push(chevalley[root].clone());
                labels.push(BasisLabel::Root(root.clone()));
            }
            for (root, _) in &raw.positive {
                let neg = root.neg();
                split_x_idx.insert(neg.clone(), basis.len());
                basis.push(chevalley[&neg].clone());
                labels.push(BasisLabel::Root(neg));
            }
        }
        RealForm::Compact => {
            for (k, t) in coroots.iter().enumerate() {
                basis.push(t * i_c);
                labels.push(BasisLabel::Cartan(k));
            }
            let s = C64::new(std::f64::consts::FRAC_1_SQRT_2, 0.0);
            for (root, _) in &raw.positive {
                let x = &chevalley[root];
                let x_neg = &chevalley[&root.neg()];
                let y = (x + x_neg) * (i_c * s);
                let z = (x - x_neg) * s;
                yz_idx.insert(root.clone(), (basis.len(), basis.len() + 1));
                basis.push(y);
                labels.push(BasisLabel::CompactY(root.clone()));
                basis.push(z);
                labels.push(BasisLabel::CompactZ(root.clone()));
            }
        }
    }

    let cartan_idx: Vec<usize> = (0..raw.simple.len()).collect();
    let roots = RootSystemData {
        cartan_idx,
        simple: raw.simple.clone(),
        positive: raw.positive.iter().map(|(r, _)| r.clone()).collect(),
        chevalley,
        split_x_idx,
        yz_idx,
    };

    let killing_scale = match family {
        Family::A => 2.0 * raw.mat_size as f64,
        Family::D => raw.mat_size as f64 - 2.0,
    };
    let model = finish_model(
        family_name(family, rank, form),
        family,
        form,
        rank,
        raw.mat_size,
        1,
        killing_scale,
        basis,
        labels,
        roots,
    )?;
    let split = cartan_split(&model)?;
    Ok(BuiltModel {
        model: Arc::new(model),
        cartan_split: Arc::new(split),
    })
}

/// Split along the full Cartan (the principal split).
pub(crate) fn cartan_split(model: &LieAlgebraModel) -> Result<SubalgebraSplit> {
    let cartan: Vec<usize> = model.roots.cartan_idx.clone();
    let k_basis: Vec<CoeffVec> = cartan.iter().map(|&a| model.basis_elem(a)).collect();
    let perp_basis: Vec<CoeffVec> = (0..model.dim)
        .filter(|a| !cartan.contains(a))
        .map(|a| model.basis_elem(a))
        .collect();
    SubalgebraSplit::new(model, k_basis, perp_basis)
}

/// Assemble the derived data (gram, duals, structure constants) and verify
/// the model invariants.
#[allow(clippy::too_many_arguments)]
pub(crate) fn finish_model(
    name: String,
    family: Family,
    form: RealForm,
    rank: usize,
    mat_size: usize,
    copies: usize,
    killing_scale: f64,
    basis: Vec<Realization>,
    labels: Vec<BasisLabel>,
    roots: RootSystemData,
) -> Result<LieAlgebraModel> {
    let dim = basis.len();
    let mut gram = OpMatrix::zeros(dim, dim);
    for a in 0..dim {
        for b in a..dim {
            let p = crate::linalg::trace_prod(&basis[a], &basis[b]);
            if p.im.abs() > 1e-12 {
                return Err(Error::Construction(format!(
                    "pairing <T_{a}, T_{b}> is not real: {p}"
                )));
            }
            gram[(a, b)] = p.re;
            gram[(b, a)] = p.re;
        }
    }
    let gram_inv = gram
        .clone()
        .try_inverse()
        .ok_or_else(|| Error::Construction("pairing matrix is singular".into()))?;

    let dual: Vec<Realization> = (0..dim)
        .map(|a| {
            let mut acc = Realization::zeros(mat_size, mat_size);
            for b in 0..dim {
                let c = gram_inv[(a, b)];
                if c != 0.0 {
                    acc += &basis[b] * C64::new(c, 0.0);
                }
            }
            acc
        })
        .collect();

    // f_{ab}^c from the realization commutators.
    let mut ad: Vec<OpMatrix> = Vec::with_capacity(dim);
    for a in 0..dim {
        let mut ad_a = OpMatrix::zeros(dim, dim);
        for b in 0..dim {
            let comm = &basis[a] * &basis[b] - &basis[b] * &basis[a];
            for c in 0..dim {
                let f = crate::linalg::trace_prod(&comm, &dual[c]);
                if f.im.abs() > 1e-10 {
                    return Err(Error::Construction(format!(
                        "structure constant f_{a}{b}^{c} is not real: {f}"
                    )));
                }
                ad_a[(c, b)] = f.re;
            }
            // closure check: the commutator must re-expand exactly
            let mut recon = Realization::zeros(mat_size, mat_size);
            for c in 0..dim {
                let f = ad_a[(c, b)];
                if f != 0.0 {
                    recon += &basis[c] * C64::new(f, 0.0);
                }
            }
            if (recon - comm).norm() > 1e-10 {
                return Err(Error::Construction(format!(
                    "basis does not close under brackets at ({a}, {b})"
                )));
            }
        }
        ad.push(ad_a);
    }

    Ok(LieAlgebraModel {
        name,
        family,
        form,
        rank,
        dim,
        mat_size,
        copies,
        killing_scale,
        basis,
        labels,
        gram,
        gram_inv,
        dual,
        ad,
        roots,
    })
}

/// Direct sum of `copies` identical summands, realized block-diagonally.
pub fn build_direct_sum(inner: &LieAlgebraModel, copies: usize) -> Result<LieAlgebraModel> {
    if copies < 2 {
        return Err(Error::Unsupported(
            "direct sum needs at least 2 copies".into(),
        ));
    }
    let n = inner.mat_size;
    let big = n * copies;
    let mut basis = Vec::with_capacity(inner.dim * copies);
    let mut labels = Vec::with_capacity(inner.dim * copies);
    for j in 0..copies {
        for (a, t) in inner.basis.iter().enumerate() {
            let mut m = Realization::zeros(big, big);
            m.view_mut((j * n, j * n), (n, n)).copy_from(t);
            basis.push(m);
            labels.push(BasisLabel::Copy(j, Box::new(inner.labels[a].clone())));
        }
    }
    // Cartan of the sum: the Cartans of every summand (used for labeling;
    // the dynamical base K is the diagonal embedding, set up by the caller).
    let mut cartan_idx = Vec::new();
    for j in 0..copies {
        for &a in &inner.roots.cartan_idx {
            cartan_idx.push(j * inner.dim + a);
        }
    }
    let roots = RootSystemData {
        cartan_idx,
        simple: inner.roots.simple.clone(),
        positive: inner.roots.positive.clone(),
        chevalley: inner.roots.chevalley.clone(),
        split_x_idx: HashMap::new(),
        yz_idx: HashMap::new(),
    };
    finish_model(
        format!("{}x{}", copies, inner.name),
        inner.family,
        inner.form,
        inner.rank,
        big,
        copies,
        inner.killing_scale,
        basis,
        labels,
        roots,
    )
}
