//! Batch entry points: `simulate`, `verify` and `describe`.

pub mod config;
pub mod describe;
pub mod simulate;
pub mod verify;

pub use config::{
    AutomorphismChoice, InitialChoice, ModelDescriptor, RMatrixChoice, RunConfig, SolverChoice,
    Tolerances,
};
pub use simulate::{
    exit_code_for, run_simulate, SimulateOutcome, EXIT_CONFIG, EXIT_OK, EXIT_SINGULARITY,
    EXIT_TOLERANCE,
};
