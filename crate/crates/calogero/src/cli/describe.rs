//! The `describe` subcommand: deterministic JSON dump of a catalogue model,
//! plus an r-matrix operator sample at a reference base point.

use super::config::parse_model_name;
use crate::error::Result;
use crate::models::{reference_q, ModelCatalogEntry};
use crate::rmatrix::eval_r;
use crate::OpMatrix;
use serde::Serialize;

#[derive(Debug, Serialize)]
pub struct RSample {
    pub q_ref: Vec<f64>,
    pub sigma_min: f64,
    /// Norm of the K-block of R(q_ref); the gauge makes it zero.
    pub k_block_norm: f64,
    pub antisymmetry_residual: f64,
}

#[derive(Debug, Serialize)]
pub struct DescribeOutput {
    pub name: String,
    pub dim: usize,
    pub rank: usize,
    pub mat_size: usize,
    /// Killing form = killing_scale * trace-form pairing.
    pub killing_scale: f64,
    pub positive_roots: Vec<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub delta_plus: Option<Vec<String>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub gamma_plus: Option<Vec<String>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub closed_form_terms: Option<Vec<String>>,
    pub xi_k_labels: Vec<String>,
    pub xi_perp_labels: Vec<String>,
    pub r_sample: RSample,
}

pub fn describe_entry(entry: &ModelCatalogEntry) -> Result<(DescribeOutput, OpMatrix)> {
    let model = entry.model();
    let q_ref = reference_q(entry);
    let op = eval_r(&entry.spec, &q_ref)?;
    let k_block_norm = (&op.matrix * &entry.spec.split.b_k).norm();
    let antisymmetry_residual =
        (op.matrix.transpose() * &model.gram + &model.gram * &op.matrix).norm();
    let out = DescribeOutput {
        name: entry.name.clone(),
        dim: model.dim,
        rank: entry.spec.rank(),
        mat_size: model.mat_size,
        killing_scale: model.killing_scale,
        positive_roots: model.roots.positive.iter().map(|r| r.to_string()).collect(),
        delta_plus: entry.folded.as_ref().map(|f| {
            f.delta_plus
                .iter()
                .map(|v| v.functional.to_string())
                .collect()
        }),
        gamma_plus: entry.folded.as_ref().map(|f| {
            f.gamma_plus
                .iter()
                .map(|v| v.functional.to_string())
                .collect()
        }),
        closed_form_terms: entry.closed_form.as_ref().map(|cf| {
            let mut terms: Vec<String> = cf
                .terms
                .iter()
                .map(|t| {
                    format!(
                        "{:+} * {} * {:?}({})",
                        t.prefactor, t.label, t.kind, t.functional
                    )
                })
                .collect();
            if let Some((pref, covs, _)) = &cf.h_minus_term {
                terms.push(format!("{pref:+} * <xi_H-, xi_H-> ({} coords)", covs.len()));
            }
            terms
        }),
        xi_k_labels: entry.dictionary.k_labels.clone(),
        xi_perp_labels: entry.dictionary.perp_labels.clone(),
        r_sample: RSample {
            q_ref: q_ref.iter().cloned().collect(),
            sigma_min: op.sigma_min,
            k_block_norm,
            antisymmetry_residual,
        },
    };
    Ok((out, op.matrix))
}

pub fn run_describe(model_name: &str) -> Result<(DescribeOutput, OpMatrix)> {
    let entry = parse_model_name(model_name)?.build()?;
    describe_entry(&entry)
}

/// Row-major CSV dump of an operator matrix, basis-indexed.
pub fn operator_csv(op: &OpMatrix) -> String {
    let mut out = String::new();
    for i in 0..op.nrows() {
        let row: Vec<String> = (0..op.ncols())
            .map(|j| format!("{:.16e}", op[(i, j)]))
            .collect();
        out.push_str(&row.join(","));
        out.push('\n');
    }
    out
}
