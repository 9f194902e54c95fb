//! The model catalogue: principal split/compact models, folded models for
//! the involutive diagram automorphisms, rational variants, and the cyclic
//! direct-sum construction, each with its closed-form Hamiltonian in
//! root/weight coordinates.

use crate::error::{Error, Result};
use crate::liealg::{
    build_direct_sum, build_model, diagram_automorphism, fold, Automorphism, BuiltModel, Family,
    FoldedData, LieAlgebraModel, RealForm, RealizationAction, Root, SubalgebraSplit,
};
use crate::rmatrix::RMatrixSpec;
use crate::{CoeffVec, OpMatrix, Realization, C64};
use std::sync::Arc;

/// Scalar shape of a potential term.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TermKind {
    /// `1 / sinh^2(arg/2)`
    InvSinh2,
    /// `1 / cosh^2(arg/2)`
    InvCosh2,
    /// `1 / sin^2(arg/2)`
    InvSin2,
    /// `1 / cos^2(arg/2)`
    InvCos2,
    /// `1 / arg^2` (rational family)
    InvSquare,
}

/// One potential term `prefactor * c_a(xi) c_b(xi) * f(root(q))`.
#[derive(Debug, Clone)]
pub struct PotentialTerm {
    pub kind: TermKind,
    pub prefactor: f64,
    /// Real covector: the root/weight evaluated on the K coordinate
    /// directions.
    pub root_cov: Vec<f64>,
    /// Human-readable functional (for `describe`).
    pub functional: Root,
    /// Coefficient extraction covectors over the full model basis.
    pub coeff_a: CoeffVec,
    pub coeff_b: CoeffVec,
    pub label: String,
}

/// Closed-form Hamiltonian: kinetic part from the K gram matrix, a list of
/// potential terms, and an optional `<xi_H^-, xi_H^->` pairing term.
#[derive(Debug, Clone)]
pub struct ClosedFormH {
    pub terms: Vec<PotentialTerm>,
    /// `(prefactor, extraction covectors, pairing matrix)` of the
    /// H^- pairing term for folded models.
    pub h_minus_term: Option<(f64, Vec<CoeffVec>, OpMatrix)>,
}

/// Labeled linear coordinates on the spin variable (the dictionaries
/// `xi_phi`, `eta_phi`, `zeta_phi`, `xi^+-`, ...): coordinates are taken in
/// the split-adapted basis [K | K-perp].
#[derive(Debug, Clone)]
pub struct CoordinateDictionary {
    pub k_labels: Vec<String>,
    pub perp_labels: Vec<String>,
}

/// A ready-made catalogue entry.
pub struct ModelCatalogEntry {
    pub name: String,
    pub spec: RMatrixSpec,
    pub closed_form: Option<ClosedFormH>,
    pub dictionary: CoordinateDictionary,
    pub folded: Option<FoldedData>,
}

impl ModelCatalogEntry {
    pub fn model(&self) -> &LieAlgebraModel {
        &self.spec.model
    }

    pub fn split(&self) -> &SubalgebraSplit {
        &self.spec.split
    }

    /// Decompose the spin variable into the labeled coordinates.
    pub fn xi_coordinates(&self, xi: &CoeffVec) -> (CoeffVec, CoeffVec) {
        (
            self.spec.split.k_coords(xi),
            self.spec.split.perp_coords(xi),
        )
    }

    /// Rebuild the spin variable from labeled coordinates.
    pub fn xi_from_coordinates(&self, k: &CoeffVec, perp: &CoeffVec) -> CoeffVec {
        self.spec.split.from_k_coords(k) + self.spec.split.from_perp_coords(perp)
    }
}

fn cplx_dot(cov: &[f64], z: &[C64]) -> C64 {
    cov.iter()
        .zip(z.iter())
        .map(|(c, v)| C64::new(*c, 0.0) * v)
        .sum()
}

fn cplx_dot_vec(cov: &CoeffVec, z: &[C64]) -> C64 {
    cov.iter()
        .zip(z.iter())
        .map(|(c, v)| C64::new(*c, 0.0) * v)
        .sum()
}

/// Evaluate the closed-form Hamiltonian with complex coordinates (the real
/// case embeds with zero imaginary parts; complex arguments serve the
/// holomorphic-model consistency checks).
pub fn closed_form_hamiltonian_complex(
    entry: &ModelCatalogEntry,
    q: &[C64],
    p: &[C64],
    xi: &[C64],
) -> Result<C64> {
    let cf = entry.closed_form.as_ref().ok_or_else(|| {
        Error::Unsupported(format!("{} has no closed-form Hamiltonian", entry.name))
    })?;
    let gram_k = &entry.spec.split.gram_k;
    let rank = entry.spec.rank();
    let mut h = C64::new(0.0, 0.0);
    for i in 0..rank {
        for j in 0..rank {
            h += C64::new(0.5 * gram_k[(i, j)], 0.0) * p[i] * p[j];
        }
    }
    for term in &cf.terms {
        let arg = cplx_dot(&term.root_cov, q);
        let f = match term.kind {
            TermKind::InvSinh2 => {
                let s = (arg / 2.0).sinh();
                (s * s).inv()
            }
            TermKind::InvCosh2 => {
                let c = (arg / 2.0).cosh();
                (c * c).inv()
            }
            TermKind::InvSin2 => {
                let s = (arg / 2.0).sin();
                (s * s).inv()
            }
            TermKind::InvCos2 => {
                let c = (arg / 2.0).cos();
                (c * c).inv()
            }
            TermKind::InvSquare => (arg * arg).inv(),
        };
        let ca = cplx_dot_vec(&term.coeff_a, xi);
        let cb = cplx_dot_vec(&term.coeff_b, xi);
        h += C64::new(term.prefactor, 0.0) * ca * cb * f;
    }
    if let Some((pref, covs, w)) = &cf.h_minus_term {
        let coords: Vec<C64> = covs.iter().map(|c| cplx_dot_vec(c, xi)).collect();
        let mut acc = C64::new(0.0, 0.0);
        for (j, cj) in coords.iter().enumerate() {
            for (k, ck) in coords.iter().enumerate() {
                acc += C64::new(w[(j, k)], 0.0) * cj * ck;
            }
        }
        h += C64::new(*pref, 0.0) * acc;
    }
    Ok(h)
}

/// Closed-form Hamiltonian on a (real, constrained) phase state.
pub fn closed_form_hamiltonian(
    entry: &ModelCatalogEntry,
    state: &crate::dynamics::PhaseState,
) -> Result<f64> {
    if state.xi_k_norm(&entry.spec) >= 1e-10 {
        return Err(Error::Precondition(
            "closed-form Hamiltonians assume the constraint xi_K = 0".into(),
        ));
    }
    let to_c = |v: &CoeffVec| -> Vec<C64> { v.iter().map(|x| C64::new(*x, 0.0)).collect() };
    let h =
        closed_form_hamiltonian_complex(entry, &to_c(&state.q), &to_c(&state.p), &to_c(&state.xi))?;
    Ok(h.re)
}

/// Real covector of a root over the K coordinate directions.
///
/// For split forms this is `phi(T_i)`; for compact forms (K spanned by
/// `i T_i`) it is the real number `phi_r` with `phi(i T_i) = i phi_r`,
/// matching the real-coordinate conventions of the compact Hamiltonians.
fn root_covector(
    model: &LieAlgebraModel,
    split: &SubalgebraSplit,
    phi: &Root,
    form: RealForm,
) -> Vec<f64> {
    split
        .k_basis
        .iter()
        .map(|k| {
            let v = phi.eval(&model.realize(k));
            match form {
                RealForm::Split => v.re,
                RealForm::Compact => v.im,
            }
        })
        .collect()
}

fn unit(dim: usize, idx: usize) -> CoeffVec {
    let mut v = CoeffVec::zeros(dim);
    v[idx] = 1.0;
    v
}

/// Principal model: theta = id, K the full Cartan, trigonometric r-matrix.
pub fn principal_model(family: Family, rank: usize, form: RealForm) -> Result<ModelCatalogEntry> {
    let built = build_model(family, rank, form)?;
    let theta = Arc::new(Automorphism::identity(&built.model));
    let spec = RMatrixSpec::trigonometric(built.model.clone(), built.cartan_split.clone(), theta)?;
    let closed_form = Some(principal_closed_form(&built, form, false));
    let dictionary = principal_dictionary(&built);
    Ok(ModelCatalogEntry {
        name: built.model.name.clone(),
        spec,
        closed_form,
        dictionary,
        folded: None,
    })
}

/// Principal rational model: K the full Cartan, `R = (ad_q|_perp)^{-1}`.
pub fn principal_rational_model(
    family: Family,
    rank: usize,
    form: RealForm,
) -> Result<ModelCatalogEntry> {
    let built = build_model(family, rank, form)?;
    let spec = RMatrixSpec::rational(built.model.clone(), built.cartan_split.clone())?;
    let closed_form = Some(principal_closed_form(&built, form, true));
    let dictionary = principal_dictionary(&built);
    Ok(ModelCatalogEntry {
        name: format!("{}-rational", built.model.name),
        spec,
        closed_form,
        dictionary,
        folded: None,
    })
}

fn principal_dictionary(built: &BuiltModel) -> CoordinateDictionary {
    let model = &built.model;
    let k_labels = (0..built.cartan_split.rank())
        .map(|k| format!("xi_H{}", k + 1))
        .collect();
    let perp_labels = built
        .cartan_split
        .perp_basis
        .iter()
        .map(|v| {
            let idx = v.iter().position(|c| *c != 0.0).unwrap();
            crate::liealg::label_name(&model.labels[idx])
        })
        .collect();
    CoordinateDictionary {
        k_labels,
        perp_labels,
    }
}

fn principal_closed_form(built: &BuiltModel, form: RealForm, rational: bool) -> ClosedFormH {
    let model = &built.model;
    let split = &built.cartan_split;
    let dim = model.dim;
    let mut terms = Vec::new();
    for phi in &model.roots.positive {
        let cov = root_covector(model, split, phi, form);
        match form {
            RealForm::Split => {
                let pos = model.roots.split_x_idx[phi];
                let neg = model.roots.split_x_idx[&phi.neg()];
                let (kind, pref) = if rational {
                    (TermKind::InvSquare, -1.0)
                } else {
                    (TermKind::InvSinh2, -0.25)
                };
                terms.push(PotentialTerm {
                    kind,
                    prefactor: pref,
                    root_cov: cov,
                    functional: phi.clone(),
                    coeff_a: unit(dim, pos),
                    coeff_b: unit(dim, neg),
                    label: format!("xi[{phi}] xi[-({phi})]"),
                });
            }
            RealForm::Compact => {
                let (y, z) = model.roots.yz_idx[phi];
                let (kind, pref) = if rational {
                    (TermKind::InvSquare, -0.5)
                } else {
                    (TermKind::InvSin2, -0.125)
                };
                for (idx, nm) in [(y, "eta"), (z, "zeta")] {
                    terms.push(PotentialTerm {
                        kind,
                        prefactor: pref,
                        root_cov: cov.clone(),
                        functional: phi.clone(),
                        coeff_a: unit(dim, idx),
                        coeff_b: unit(dim, idx),
                        label: format!("{nm}[{phi}]^2"),
                    });
                }
            }
        }
    }
    ClosedFormH {
        terms,
        h_minus_term: None,
    }
}

/// The folded series of the catalogue.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FoldedSeries {
    /// `A_{2n-1}`, folding to `C_n`.
    AOdd,
    /// `A_{2n}`, folding to `B_n`.
    AEven,
    /// `D_{n+1}`, folding to `B_n`.
    D,
}

/// Folded model: theta the involutive diagram automorphism, K = H_r^+
/// (split) or i H_r^+ (compact).
pub fn folded_model(series: FoldedSeries, n: usize, form: RealForm) -> Result<ModelCatalogEntry> {
    let (family, rank) = match series {
        FoldedSeries::AOdd => {
            if n < 2 {
                return Err(Error::Unsupported(
                    "A_{2n-1} folding needs n >= 2 (A_1 has no diagram symmetry)".into(),
                ));
            }
            (Family::A, 2 * n - 1)
        }
        FoldedSeries::AEven => (Family::A, 2 * n),
        FoldedSeries::D => (Family::D, n + 1),
    };
    folded_model_for(family, rank, form)
}

/// Folded model addressed by the unfolded family and rank.
pub fn folded_model_for(family: Family, rank: usize, form: RealForm) -> Result<ModelCatalogEntry> {
    let built = build_model(family, rank, form)?;
    let model = built.model.clone();
    let tau = Arc::new(diagram_automorphism(&model)?);
    let folded = fold(&model, &tau)?;
    let i_c = C64::new(0.0, 1.0);
    let s = C64::new(std::f64::consts::FRAC_1_SQRT_2, 0.0);

    // K basis from the H^+ pattern, perp basis from H^- plus the folded
    // root/weight vectors (split) or their compact combinations.
    let mut k_basis = Vec::new();
    for h in &folded.h_plus {
        let mat = match form {
            RealForm::Split => h.clone(),
            RealForm::Compact => h * i_c,
        };
        k_basis.push(model.expand(&mat)?);
    }
    let mut perp_basis: Vec<CoeffVec> = Vec::new();
    let mut perp_labels: Vec<String> = Vec::new();
    let mut h_minus_covs_idx = Vec::new();
    for (j, h) in folded.h_minus.iter().enumerate() {
        let mat = match form {
            RealForm::Split => h.clone(),
            RealForm::Compact => h * i_c,
        };
        h_minus_covs_idx.push(perp_basis.len());
        perp_basis.push(model.expand(&mat)?);
        perp_labels.push(format!("xi_H-{}", j + 1));
    }
    // indices of the coordinate pairs for the closed form
    let mut delta_pairs = Vec::new();
    let mut gamma_pairs = Vec::new();
    match form {
        RealForm::Split => {
            for fv in &folded.delta_plus {
                let i_pos = perp_basis.len();
                perp_basis.push(model.expand(&fv.x_pos)?);
                perp_labels.push(format!("xi+[{}]", fv.functional));
                let i_neg = perp_basis.len();
                perp_basis.push(model.expand(&fv.x_neg)?);
                perp_labels.push(format!("xi+[-({})]", fv.functional));
                delta_pairs.push((i_pos, i_neg));
            }
            for fv in &folded.gamma_plus {
                let i_pos = perp_basis.len();
                perp_basis.push(model.expand(&fv.x_pos)?);
                perp_labels.push(format!("xi-[{}]", fv.functional));
                let i_neg = perp_basis.len();
                perp_basis.push(model.expand(&fv.x_neg)?);
                perp_labels.push(format!("xi-[-({})]", fv.functional));
                gamma_pairs.push((i_pos, i_neg));
            }
        }
        RealForm::Compact => {
            for (vectors, pairs, tag) in [
                (&folded.delta_plus, &mut delta_pairs, "+"),
                (&folded.gamma_plus, &mut gamma_pairs, "-"),
            ] {
                for fv in vectors.iter() {
                    let y = (&fv.x_pos + &fv.x_neg) * (i_c * s);
                    let z = (&fv.x_pos - &fv.x_neg) * s;
                    let i_y = perp_basis.len();
                    perp_basis.push(model.expand(&y)?);
                    perp_labels.push(format!("eta{tag}[{}]", fv.functional));
                    let i_z = perp_basis.len();
                    perp_basis.push(model.expand(&z)?);
                    perp_labels.push(format!("zeta{tag}[{}]", fv.functional));
                    pairs.push((i_y, i_z));
                }
            }
        }
    }

    let split = Arc::new(SubalgebraSplit::new(&model, k_basis, perp_basis)?);
    let spec = RMatrixSpec::trigonometric(model.clone(), split.clone(), tau)?;

    // closed-form terms; extraction covectors are rows of perp_extract
    let extract_row = |idx: usize| -> CoeffVec { split.perp_extract.row(idx).transpose() };
    let mut terms = Vec::new();
    for (fv, (ia, ib)) in folded.delta_plus.iter().zip(&delta_pairs) {
        let cov: Vec<f64> = fv.functional.0.iter().map(|c| *c as f64).collect();
        match form {
            RealForm::Split => terms.push(PotentialTerm {
                kind: TermKind::InvSinh2,
                prefactor: -0.25,
                root_cov: cov,
                functional: fv.functional.clone(),
                coeff_a: extract_row(*ia),
                coeff_b: extract_row(*ib),
                label: format!("xi+[{0}] xi+[-({0})]", fv.functional),
            }),
            RealForm::Compact => {
                for idx in [*ia, *ib] {
                    terms.push(PotentialTerm {
                        kind: TermKind::InvSin2,
                        prefactor: -0.125,
                        root_cov: cov.clone(),
                        functional: fv.functional.clone(),
                        coeff_a: extract_row(idx),
                        coeff_b: extract_row(idx),
                        label: format!("(eta/zeta)+[{}]^2", fv.functional),
                    });
                }
            }
        }
    }
    for (fv, (ia, ib)) in folded.gamma_plus.iter().zip(&gamma_pairs) {
        let cov: Vec<f64> = fv.functional.0.iter().map(|c| *c as f64).collect();
        match form {
            RealForm::Split => terms.push(PotentialTerm {
                kind: TermKind::InvCosh2,
                prefactor: 0.25,
                root_cov: cov,
                functional: fv.functional.clone(),
                coeff_a: extract_row(*ia),
                coeff_b: extract_row(*ib),
                label: format!("xi-[{0}] xi-[-({0})]", fv.functional),
            }),
            RealForm::Compact => {
                for idx in [*ia, *ib] {
                    terms.push(PotentialTerm {
                        kind: TermKind::InvCos2,
                        // sign forced by H = <L,L>/2 and by holomorphic
                        // continuation of the split formula
                        prefactor: -0.125,
                        root_cov: cov.clone(),
                        functional: fv.functional.clone(),
                        coeff_a: extract_row(idx),
                        coeff_b: extract_row(idx),
                        label: format!("(eta/zeta)-[{}]^2", fv.functional),
                    });
                }
            }
        }
    }
    // <xi_H^-, xi_H^-> term: +1/8 (split), -1/8 (compact), with the
    // positive pairing matrix of the real H^- pattern vectors.
    let h_minus_term = if folded.h_minus.is_empty() {
        None
    } else {
        let nm = folded.h_minus.len();
        let mut w = OpMatrix::zeros(nm, nm);
        for j in 0..nm {
            for k in 0..nm {
                let t = crate::linalg::trace_prod(&folded.h_minus[j], &folded.h_minus[k]);
                w[(j, k)] = t.re;
            }
        }
        let covs: Vec<CoeffVec> = h_minus_covs_idx.iter().map(|&i| extract_row(i)).collect();
        let pref = match form {
            RealForm::Split => 0.125,
            RealForm::Compact => -0.125,
        };
        Some((pref, covs, w))
    };

    let dictionary = CoordinateDictionary {
        k_labels: (0..split.rank())
            .map(|k| format!("xi_H+{}", k + 1))
            .collect(),
        perp_labels,
    };
    let form_tag = match form {
        RealForm::Split => "split",
        RealForm::Compact => "compact",
    };
    let fam_tag = match family {
        Family::A => "A",
        Family::D => "D",
    };
    Ok(ModelCatalogEntry {
        name: format!("{fam_tag}{rank}-{form_tag}-folded"),
        spec,
        closed_form: Some(ClosedFormH {
            terms,
            h_minus_term,
        }),
        dictionary,
        folded: Some(folded),
    })
}

/// Cyclic direct-sum model over `copies` identical summands with the
/// automorphism `theta(u_1, ..., u_N) = (tau u_N, tau u_1, ..., tau u_{N-1})`
/// and K the diagonal embedding of the inner Cartan. `tau` must preserve the
/// inner scalar product and fix the inner Cartan pointwise (`None` is the
/// plain cyclic permutation).
pub fn cyclic_model(
    family: Family,
    rank: usize,
    form: RealForm,
    copies: usize,
    tau: Option<&Automorphism>,
) -> Result<ModelCatalogEntry> {
    let inner = build_model(family, rank, form)?;
    let inner_model = inner.model.clone();
    if let Some(t) = tau {
        let iso = t.op.transpose() * &inner_model.gram * &t.op;
        if (iso - &inner_model.gram).norm() > 1e-9 {
            return Err(Error::Construction(
                "cyclic twist is not an isometry of the inner scalar product".into(),
            ));
        }
        for &ci in &inner_model.roots.cartan_idx {
            let k = inner_model.basis_elem(ci);
            if (t.apply(&k) - &k).norm() > 1e-10 {
                return Err(Error::Unsupported(
                    "cyclic twist must fix the inner Cartan pointwise".into(),
                ));
            }
        }
    }
    let model = Arc::new(build_direct_sum(&inner_model, copies)?);
    let inner_dim = inner_model.dim;

    let inner_action = tau
        .map(|t| t.action.clone())
        .unwrap_or(RealizationAction::Identity);
    let action = RealizationAction::CyclicBlocks {
        copies,
        block: inner_model.mat_size,
        inner: Box::new(inner_action),
    };
    let op = Automorphism::op_from_action(&model, &action)?;
    // order: smallest k <= 2N with op^k = id
    let id = OpMatrix::identity(model.dim, model.dim);
    let mut power = id.clone();
    let mut order = None;
    for k in 1..=(2 * copies) {
        power = &op * power;
        if (&power - &id).norm() < 1e-10 {
            order = Some(k);
            break;
        }
    }
    let theta = Arc::new(Automorphism {
        op,
        order,
        action,
        kind: crate::liealg::AutKind::Cyclic(copies),
    });

    // K = diagonal embedding of the inner Cartan
    let mut k_basis = Vec::new();
    for &a in &inner_model.roots.cartan_idx {
        let mut v = CoeffVec::zeros(model.dim);
        for j in 0..copies {
            v[j * inner_dim + a] = 1.0;
        }
        k_basis.push(v);
    }
    // perp: Cartan differences across blocks plus every non-Cartan
    // direction in every block
    let mut perp_basis = Vec::new();
    let mut perp_labels = Vec::new();
    for &a in &inner_model.roots.cartan_idx {
        for j in 1..copies {
            let mut v = CoeffVec::zeros(model.dim);
            v[j * inner_dim + a] = 1.0;
            v[a] = -1.0;
            perp_basis.push(v);
            perp_labels.push(format!("cartan_diff#{j}[{a}]"));
        }
    }
    for j in 0..copies {
        for a in 0..inner_dim {
            if inner_model.roots.cartan_idx.contains(&a) {
                continue;
            }
            let mut v = CoeffVec::zeros(model.dim);
            v[j * inner_dim + a] = 1.0;
            perp_basis.push(v);
            perp_labels.push(format!(
                "({})#{}",
                crate::liealg::label_name(&inner_model.labels[a]),
                j + 1
            ));
        }
    }
    let split = Arc::new(SubalgebraSplit::new(&model, k_basis, perp_basis)?);
    let spec = RMatrixSpec::trigonometric(model.clone(), split.clone(), theta)?;
    let dictionary = CoordinateDictionary {
        k_labels: (0..split.rank())
            .map(|k| format!("xi_K{}", k + 1))
            .collect(),
        perp_labels,
    };
    Ok(ModelCatalogEntry {
        name: format!("{}x{}-cyclic", copies, inner_model.name),
        spec,
        closed_form: None,
        dictionary,
        folded: None,
    })
}

/// Reference regular base point used by `describe`: staggered K-coordinates
/// away from the singular walls.
pub fn reference_q(entry: &ModelCatalogEntry) -> CoeffVec {
    let rank = entry.spec.rank();
    CoeffVec::from_fn(rank, |i, _| 0.9 - 0.13 * i as f64)
}

/// Matrix realization of the group element `exp(q)` for a K point.
pub fn realize_k_exponential(entry: &ModelCatalogEntry, q: &CoeffVec) -> Realization {
    let q_full = entry.spec.q_full(q);
    crate::linalg::expm(&entry.model().realize(&q_full))
}
