//! The `simulate` subcommand: run the configured solvers, write trajectory
//! CSVs and the cross-solver comparison report.

use super::config::{RunConfig, SolverChoice};
use crate::error::{Error, Result};
use crate::models::ModelCatalogEntry;
use crate::rmatrix::RKind;
use crate::solver::{
    compare_runs, integrate_rk4, solve_geodesic_algebra, solve_geodesic_group, uniform_grid,
    ComparisonReport, TrajectoryRecord,
};
use std::fs;
use std::path::{Path, PathBuf};

/// Exit-code contract: 0 all-pass, 2 tolerance failure,
/// 3 singularity/truncation, 4 config error.
pub const EXIT_OK: i32 = 0;
pub const EXIT_TOLERANCE: i32 = 2;
pub const EXIT_SINGULARITY: i32 = 3;
pub const EXIT_CONFIG: i32 = 4;

#[derive(Debug)]
pub struct SimulateOutcome {
    pub exit_code: i32,
    pub csv_paths: Vec<PathBuf>,
    pub report_path: Option<PathBuf>,
    pub report: Option<ComparisonReport>,
    pub messages: Vec<String>,
}

/// Map an error to the exit-code contract.
pub fn exit_code_for(err: &Error) -> i32 {
    match err {
        Error::Config(_) | Error::Precondition(_) | Error::Unsupported(_) => EXIT_CONFIG,
        Error::Singular { .. } | Error::NewtonDivergence { .. } | Error::LogBranch(_) => {
            EXIT_SINGULARITY
        }
        _ => EXIT_CONFIG,
    }
}

pub fn run_simulate(config: &RunConfig) -> Result<SimulateOutcome> {
    let entry = config.model.build()?;
    let state0 = config.initial_state(&entry)?;
    if config.dt <= 0.0 || config.tspan[1] <= config.tspan[0] || config.samples < 2 {
        return Err(Error::Config(
            "need dt > 0, tspan[1] > tspan[0] and samples >= 2".into(),
        ));
    }
    let times = uniform_grid(config.tspan[0], config.tspan[1], config.samples);

    // run everything in memory first so that failed runs leave no files
    let mut records: Vec<TrajectoryRecord> = Vec::new();
    let geodesic = |state0, times: &[f64]| -> Result<TrajectoryRecord> {
        match entry.spec.kind {
            RKind::Trigonometric => solve_geodesic_group(&entry.spec, state0, times),
            RKind::Rational => solve_geodesic_algebra(&entry.spec, state0, times),
        }
    };
    match config.solver {
        SolverChoice::Geodesic => records.push(geodesic(&state0, &times)?),
        SolverChoice::Rk4 => records.push(integrate_rk4(&entry.spec, &state0, &times, config.dt)?),
        SolverChoice::Both => {
            records.push(geodesic(&state0, &times)?);
            records.push(integrate_rk4(&entry.spec, &state0, &times, config.dt)?);
        }
    }

    let mut outcome = SimulateOutcome {
        exit_code: EXIT_OK,
        csv_paths: Vec::new(),
        report_path: None,
        report: None,
        messages: Vec::new(),
    };
    for record in &records {
        if let Some(tr) = &record.truncated {
            outcome.exit_code = EXIT_SINGULARITY;
            outcome.messages.push(format!(
                "{} truncated at t = {}: {}",
                record.solver.as_str(),
                tr.at_time,
                tr.reason
            ));
        }
    }
    if records.len() == 2 {
        let report = compare_runs(&records[0], &records[1], config.tolerances.cross_solver)?;
        if !report.pass && outcome.exit_code == EXIT_OK {
            outcome.exit_code = EXIT_TOLERANCE;
            outcome
                .messages
                .push(format!("cross-solver comparison failed: {report:?}"));
        }
        outcome.report = Some(report);
    }

    let out_dir = Path::new(&config.output_dir);
    fs::create_dir_all(out_dir)?;
    for record in &records {
        let path = out_dir.join(format!("trajectory_{}.csv", record.solver.as_str()));
        write_atomic(&path, &trajectory_csv(&entry, record))?;
        outcome.csv_paths.push(path);
    }
    if let Some(report) = &outcome.report {
        let path = out_dir.join("comparison.json");
        let text = serde_json::to_string_pretty(report)
            .map_err(|e| Error::Config(format!("report serialization: {e}")))?;
        write_atomic(&path, &text)?;
        outcome.report_path = Some(path);
    }
    Ok(outcome)
}

/// Render a trajectory as CSV with the documented fixed column order and
/// 17-significant-digit decimals. Complex-valued invariants (`trL*`,
/// `eig_*`) expand into `_re`/`_im` column pairs.
pub fn trajectory_csv(entry: &ModelCatalogEntry, record: &TrajectoryRecord) -> String {
    let rank = entry.spec.rank();
    let dim = entry.model().dim;
    let mat_size = entry.model().mat_size;
    let kmax = record.kmax;
    let mut header: Vec<String> = vec!["t".into()];
    for i in 1..=rank {
        header.push(format!("q_{i}"));
    }
    for i in 1..=rank {
        header.push(format!("p_{i}"));
    }
    for a in 1..=dim {
        header.push(format!("xi_{a}"));
    }
    header.push("H".into());
    for k in 2..=kmax {
        header.push(format!("trL{k}_re"));
        header.push(format!("trL{k}_im"));
    }
    for m in 1..=mat_size {
        header.push(format!("eig_{m}_re"));
        header.push(format!("eig_{m}_im"));
    }
    header.push("casimir2".into());
    header.push("solver".into());
    header.push("newton_iters".into());

    let fmt = |x: f64| format!("{x:.16e}");
    let mut out = header.join(",");
    out.push('\n');
    for j in 0..record.times.len() {
        let state = &record.states[j];
        let inv = &record.invariants[j];
        let mut row: Vec<String> = vec![fmt(record.times[j])];
        row.extend(state.q.iter().map(|x| fmt(*x)));
        row.extend(state.p.iter().map(|x| fmt(*x)));
        row.extend(state.xi.iter().map(|x| fmt(*x)));
        row.push(fmt(inv.h));
        for k in 2..=kmax {
            let t = inv.spectral.traces[k - 1];
            row.push(fmt(t.re));
            row.push(fmt(t.im));
        }
        match &inv.spectral.eigenvalues {
            Some(eigs) => {
                for e in eigs {
                    row.push(fmt(e.re));
                    row.push(fmt(e.im));
                }
            }
            None => {
                for _ in 0..mat_size {
                    row.push("nan".into());
                    row.push("nan".into());
                }
            }
        }
        row.push(fmt(inv.casimir2));
        row.push(record.solver.as_str().to_string());
        row.push(record.newton_iters[j].to_string());
        out.push_str(&row.join(","));
        out.push('\n');
    }
    out
}

/// Write through a temp file and rename, so partially written outputs never
/// appear under the final name.
pub fn write_atomic(path: &Path, contents: &str) -> Result<()> {
    let tmp = path.with_extension("tmp");
    fs::write(&tmp, contents)?;
    fs::rename(&tmp, path)?;
    Ok(())
}
