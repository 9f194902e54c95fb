//! Run configuration: JSON-serializable model descriptors, initial states
//! and solver settings.

use crate::dynamics::{PhaseState, PhaseStateData};
use crate::error::{Error, Result};
use crate::liealg::{Family, RealForm};
use crate::models::{
    cyclic_model, folded_model_for, principal_model, principal_rational_model, ModelCatalogEntry,
};
use rand::SeedableRng;
use rand_chacha::ChaCha12Rng;
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum AutomorphismChoice {
    #[default]
    Trivial,
    Diagram,
    Cyclic(usize),
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum RMatrixChoice {
    #[default]
    Trigonometric,
    Rational,
}

/// Serializable model descriptor:
/// `{family, rank, form, automorphism, rmatrix}`.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ModelDescriptor {
    pub family: String,
    pub rank: usize,
    pub form: RealForm,
    #[serde(default)]
    pub automorphism: AutomorphismChoice,
    #[serde(default)]
    pub rmatrix: RMatrixChoice,
}

impl ModelDescriptor {
    pub fn family_tag(&self) -> Result<Family> {
        match self.family.as_str() {
            "A" | "a" => Ok(Family::A),
            "D" | "d" => Ok(Family::D),
            other => Err(Error::Config(format!("unknown family {other:?}"))),
        }
    }

    /// Build the catalogue entry for this descriptor.
    pub fn build(&self) -> Result<ModelCatalogEntry> {
        let family = self.family_tag()?;
        match (&self.automorphism, self.rmatrix) {
            (AutomorphismChoice::Trivial, RMatrixChoice::Trigonometric) => {
                principal_model(family, self.rank, self.form)
            }
            (AutomorphismChoice::Trivial, RMatrixChoice::Rational) => {
                principal_rational_model(family, self.rank, self.form)
            }
            (AutomorphismChoice::Diagram, RMatrixChoice::Trigonometric) => {
                folded_model_for(family, self.rank, self.form)
            }
            (AutomorphismChoice::Cyclic(n), RMatrixChoice::Trigonometric) => {
                cyclic_model(family, self.rank, self.form, *n, None)
            }
            (_, RMatrixChoice::Rational) => Err(Error::Config(
                "the rational r-matrix needs the full Cartan base: use automorphism = trivial"
                    .into(),
            )),
        }
    }
}

/// Parse a catalogue name like `A2-split`, `A3-compact-folded`,
/// `A1-split-rational` or `3xA1-split-cyclic`.
pub fn parse_model_name(name: &str) -> Result<ModelDescriptor> {
    let mut body = name.trim();
    let mut automorphism = AutomorphismChoice::Trivial;
    let mut rmatrix = RMatrixChoice::Trigonometric;
    if let Some(stripped) = body.strip_suffix("-cyclic") {
        let (copies, rest) = stripped.split_once('x').ok_or_else(|| {
            Error::Config(format!(
                "cyclic name must look like 2xA1-split-cyclic, got {name:?}"
            ))
        })?;
        let n: usize = copies
            .parse()
            .map_err(|_| Error::Config(format!("bad copy count in {name:?}")))?;
        automorphism = AutomorphismChoice::Cyclic(n);
        body = rest;
    } else if let Some(stripped) = body.strip_suffix("-folded") {
        automorphism = AutomorphismChoice::Diagram;
        body = stripped;
    } else if let Some(stripped) = body.strip_suffix("-rational") {
        rmatrix = RMatrixChoice::Rational;
        body = stripped;
    }
    let (fam_rank, form) = body
        .split_once('-')
        .ok_or_else(|| Error::Config(format!("model name {name:?} missing -split/-compact")))?;
    let form = match form {
        "split" => RealForm::Split,
        "compact" => RealForm::Compact,
        other => return Err(Error::Config(format!("unknown real form {other:?}"))),
    };
    let (family, rank_str) = fam_rank.split_at(1);
    let rank: usize = rank_str
        .parse()
        .map_err(|_| Error::Config(format!("bad rank in model name {name:?}")))?;
    Ok(ModelDescriptor {
        family: family.to_string(),
        rank,
        form,
        automorphism,
        rmatrix,
    })
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum InitialChoice {
    Explicit(PhaseStateData),
    Random { seed: u64, scale: f64 },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SolverChoice {
    Geodesic,
    Rk4,
    Both,
}

fn default_cross_tol() -> f64 {
    1e-6
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Tolerances {
    #[serde(default = "default_cross_tol")]
    pub cross_solver: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Tolerances {
            cross_solver: default_cross_tol(),
        }
    }
}

fn default_samples() -> usize {
    101
}

/// One batch run: model, initial state, time span and solver selection.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct RunConfig {
    pub model: ModelDescriptor,
    pub initial: InitialChoice,
    pub tspan: [f64; 2],
    pub dt: f64,
    #[serde(default = "default_samples")]
    pub samples: usize,
    pub solver: SolverChoice,
    #[serde(default)]
    pub tolerances: Tolerances,
    pub output_dir: String,
}

impl RunConfig {
    pub fn from_json(text: &str) -> Result<RunConfig> {
        serde_json::from_str(text).map_err(|e| Error::Config(format!("config parse error: {e}")))
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("config serializes")
    }

    /// Resolve the initial state: explicit states are dimension-checked,
    /// random states are drawn constrained at a wide-margin regular point.
    pub fn initial_state(&self, entry: &ModelCatalogEntry) -> Result<PhaseState> {
        let rank = entry.spec.rank();
        let dim = entry.model().dim;
        match &self.initial {
            InitialChoice::Explicit(data) => {
                if data.q.len() != rank || data.p.len() != rank || data.xi.len() != dim {
                    return Err(Error::Config(format!(
                        "initial state dimensions (q {}, p {}, xi {}) do not match the model (rank {rank}, dim {dim})",
                        data.q.len(),
                        data.p.len(),
                        data.xi.len()
                    )));
                }
                Ok(PhaseState::from_data(data))
            }
            InitialChoice::Random { seed, scale } => {
                let mut rng = ChaCha12Rng::seed_from_u64(*seed);
                Ok(crate::dynamics::random_trajectory_state(
                    &entry.spec,
                    &mut rng,
                    *scale,
                ))
            }
        }
    }
}
