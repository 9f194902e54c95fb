//! Folding by an involutive diagram automorphism: orbit decomposition of the
//! positive roots, sign constants, and the folded root/weight vectors.

use super::automorphism::{root_image, AutKind, Automorphism};
use super::roots::Root;
use super::{Family, LieAlgebraModel};
use crate::error::{Error, Result};
use crate::{Realization, C64};
use std::collections::HashMap;

/// A folded root or weight: the restricted functional on H^+ (in `e_k`
/// coordinates) together with the vectors for the functional and its
/// negative.
#[derive(Debug, Clone)]
pub struct FoldedVector {
    pub functional: Root,
    pub x_pos: Realization,
    pub x_neg: Realization,
}

/// Result of the folding procedure.
#[derive(Debug, Clone)]
pub struct FoldedData {
    /// Representatives of the 2-point orbits in Phi_+.
    pub psi: Vec<Root>,
    /// Fixed roots with c_phi = +1 / -1.
    pub xi_plus: Vec<Root>,
    pub xi_minus: Vec<Root>,
    /// Sign constants c_phi for all positive roots.
    pub c_sign: HashMap<Root, f64>,
    /// Positive roots of (H^+, A^+) with root vectors X^+.
    pub delta_plus: Vec<FoldedVector>,
    /// Positive weights of (H^+, A^-) with weight vectors X^-.
    pub gamma_plus: Vec<FoldedVector>,
    /// Real diagonal pattern basis of H_r^+ (q_k coordinate directions).
    pub h_plus: Vec<Realization>,
    /// Pattern basis of H_r^-.
    pub h_minus: Vec<Realization>,
}

impl FoldedData {
    pub fn folded_rank(&self) -> usize {
        self.h_plus.len()
    }

    pub fn delta_set(&self) -> Vec<Vec<i32>> {
        let mut v: Vec<Vec<i32>> = self
            .delta_plus
            .iter()
            .map(|f| f.functional.0.clone())
            .collect();
        v.sort();
        v
    }

    pub fn gamma_set(&self) -> Vec<Vec<i32>> {
        let mut v: Vec<Vec<i32>> = self
            .gamma_plus
            .iter()
            .map(|f| f.functional.0.clone())
            .collect();
        v.sort();
        v
    }
}

fn diag_elem(m: usize, k: usize, sign: f64) -> Realization {
    let mut e = Realization::zeros(m, m);
    e[(k, k)] = C64::new(sign, 0.0);
    e
}

/// Pattern bases of H_r^+ and H_r^- for the supported families.
fn h_pattern_bases(model: &LieAlgebraModel) -> Result<(Vec<Realization>, Vec<Realization>)> {
    let m = model.mat_size;
    let rank = model.rank;
    match model.family {
        Family::A => {
            let n = rank.div_ceil(2); // folded rank for both A_{2n-1} and A_{2n}
            let mut h_plus = Vec::new();
            for k in 0..n {
                let h = diag_elem(m, k, 1.0) + diag_elem(m, m - 1 - k, -1.0);
                h_plus.push(h);
            }
            let mut h_minus = Vec::new();
            if rank % 2 == 1 {
                // A_{2n-1}: m = 2n; one relation kills a candidate
                for k in 0..n.saturating_sub(1) {
                    let mut h = diag_elem(m, k, 1.0) + diag_elem(m, m - 1 - k, 1.0);
                    let shift = C64::new(2.0 / m as f64, 0.0);
                    for j in 0..m {
                        h[(j, j)] -= shift;
                    }
                    h_minus.push(h);
                }
            } else {
                // A_{2n}: m = 2n + 1, center index n
                for k in 0..n {
                    let h =
                        diag_elem(m, k, 1.0) + diag_elem(m, m - 1 - k, 1.0) + diag_elem(m, n, -2.0);
                    h_minus.push(h);
                }
            }
            Ok((h_plus, h_minus))
        }
        Family::D => {
            // D_{n+1} with folded rank n = rank - 1
            let n = rank - 1;
            let h_plus = (0..n)
                .map(|k| diag_elem(m, k, 1.0) + diag_elem(m, m - 1 - k, -1.0))
                .collect();
            let h_minus = vec![diag_elem(m, n, 1.0) + diag_elem(m, m - 1 - n, -1.0)];
            Ok((h_plus, h_minus))
        }
    }
}

/// Restrict a root to H^+ and read off integer `e_k` coordinates.
fn restrict(phi: &Root, h_plus: &[Realization]) -> Result<Root> {
    let mut coords = Vec::with_capacity(h_plus.len());
    for h in h_plus {
        let v = phi.eval(h);
        let rounded = v.re.round();
        if (v.re - rounded).abs() > 1e-9 || v.im.abs() > 1e-12 {
            return Err(Error::Construction(format!(
                "restriction of {phi} is not integral: {v}"
            )));
        }
        coords.push(rounded as i32);
    }
    Ok(Root(coords))
}

/// Fold the model along an involutive diagram automorphism, producing the
/// orbit decomposition, sign constants and the folded root/weight vectors.
pub fn fold(model: &LieAlgebraModel, tau: &Automorphism) -> Result<FoldedData> {
    if tau.kind != AutKind::Diagram || tau.order != Some(2) {
        return Err(Error::Unsupported(
            "folding requires an involutive diagram automorphism".into(),
        ));
    }
    let (h_plus, h_minus) = h_pattern_bases(model)?;

    let mut c_sign: HashMap<Root, f64> = HashMap::new();
    let mut orbit_of: HashMap<Root, Root> = HashMap::new();
    for phi in &model.roots.positive {
        let (tau_phi, c) = root_image(model, &tau.action, phi)?;
        if (c * c - 1.0).abs() > 1e-10 {
            return Err(Error::Construction(format!(
                "c_phi^2 = {} != 1 at {phi}",
                c * c
            )));
        }
        if !tau_phi.is_positive() {
            return Err(Error::Construction(format!(
                "diagram automorphism does not permute positive roots at {phi}"
            )));
        }
        c_sign.insert(phi.clone(), c);
        orbit_of.insert(phi.clone(), tau_phi);
    }
    // c_phi = c_{tau(phi)}
    for (phi, tau_phi) in &orbit_of {
        if (c_sign[phi] - c_sign[tau_phi]).abs() > 1e-10 {
            return Err(Error::Construction(format!("c_phi != c_tau(phi) at {phi}")));
        }
    }

    let mut psi = Vec::new();
    let mut xi_plus = Vec::new();
    let mut xi_minus = Vec::new();
    for phi in &model.roots.positive {
        let tau_phi = &orbit_of[phi];
        if tau_phi == phi {
            if c_sign[phi] > 0.0 {
                xi_plus.push(phi.clone());
            } else {
                xi_minus.push(phi.clone());
            }
        } else if phi < tau_phi {
            psi.push(phi.clone());
        }
    }

    let sqrt_half = C64::new(std::f64::consts::FRAC_1_SQRT_2, 0.0);
    let mut delta_plus = Vec::new();
    let mut gamma_plus = Vec::new();
    let mut seen: HashMap<Root, &'static str> = HashMap::new();

    let push_folded = |target: &mut Vec<FoldedVector>,
                       functional: Root,
                       x_pos: Realization,
                       x_neg: Realization|
     -> Result<()> {
        // normalization and sigma-relation of the folded vectors
        let pair = model.pairing_mats(&x_pos, &x_neg);
        if (pair - C64::new(1.0, 0.0)).norm() > 1e-12 {
            return Err(Error::Construction(format!(
                "<X_mu, X_-mu> = {pair} != 1 at {functional}"
            )));
        }
        let sigma_dev = (model.chevalley_sigma(&x_pos) + &x_neg).norm();
        if sigma_dev > 1e-12 {
            return Err(Error::Construction(format!(
                "sigma(X_mu) != -X_-mu at {functional} (dev {sigma_dev:.2e})"
            )));
        }
        target.push(FoldedVector {
            functional,
            x_pos,
            x_neg,
        });
        Ok(())
    };

    for phi in &psi {
        let functional = restrict(phi, &h_plus)?;
        if seen.insert(functional.clone(), "psi").is_some() {
            return Err(Error::Construction(format!(
                "distinct orbits restrict to the same functional {functional}"
            )));
        }
        let x_p = &model.roots.chevalley[phi];
        let x_n = &model.roots.chevalley[&phi.neg()];
        let tx_p = tau.action.apply_alg(x_p);
        let tx_n = tau.action.apply_alg(x_n);
        push_folded(
            &mut delta_plus,
            functional.clone(),
            (x_p + &tx_p) * sqrt_half,
            (x_n + &tx_n) * sqrt_half,
        )?;
        push_folded(
            &mut gamma_plus,
            functional,
            (x_p - &tx_p) * sqrt_half,
            (x_n - &tx_n) * sqrt_half,
        )?;
    }
    for phi in &xi_plus {
        let functional = restrict(phi, &h_plus)?;
        if seen.insert(functional.clone(), "xi+").is_some() {
            return Err(Error::Construction(format!(
                "distinct orbits restrict to the same functional {functional}"
            )));
        }
        push_folded(
            &mut delta_plus,
            functional,
            model.roots.chevalley[phi].clone(),
            model.roots.chevalley[&phi.neg()].clone(),
        )?;
    }
    for phi in &xi_minus {
        let functional = restrict(phi, &h_plus)?;
        if seen.insert(functional.clone(), "xi-").is_some() {
            return Err(Error::Construction(format!(
                "distinct orbits restrict to the same functional {functional}"
            )));
        }
        push_folded(
            &mut gamma_plus,
            functional,
            model.roots.chevalley[phi].clone(),
            model.roots.chevalley[&phi.neg()].clone(),
        )?;
    }

    // weight relations [h, X_mu] = mu(h) X_mu on the pattern basis
    for (vectors, tag) in [(&delta_plus, "X+"), (&gamma_plus, "X-")] {
        for fv in vectors.iter() {
            for (k, h) in h_plus.iter().enumerate() {
                let comm = h * &fv.x_pos - &fv.x_pos * h;
                let want = &fv.x_pos * C64::new(fv.functional.0[k] as f64, 0.0);
                if (comm - want).norm() > 1e-12 {
                    return Err(Error::Construction(format!(
                        "weight relation failed for {tag} at {}",
                        fv.functional
                    )));
                }
            }
        }
    }

    Ok(FoldedData {
        psi,
        xi_plus,
        xi_minus,
        c_sign,
        delta_plus,
        gamma_plus,
        h_plus,
        h_minus,
    })
}
