use calogero::cli::describe::{operator_csv, run_describe};
use calogero::cli::simulate::{
    exit_code_for, run_simulate, write_atomic, EXIT_CONFIG, EXIT_OK, EXIT_TOLERANCE,
};
use calogero::cli::verify::run_verify;
use calogero::cli::RunConfig;
use clap::{Parser, Subcommand};
use std::path::PathBuf;
use std::process::ExitCode;

#[derive(Parser)]
#[command(
    name = "calogero",
    about = "Spin Calogero models from dynamical r-matrices: build, verify, solve",
    version
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run the configured solvers and emit trajectory CSVs plus the
    /// cross-solver comparison report.
    Simulate {
        /// JSON run configuration.
        #[arg(short, long)]
        config: PathBuf,
    },
    /// Run the verification suites over the model catalogue.
    Verify {
        /// rmatrix | dynamics | folding | all
        #[arg(long, default_value = "all")]
        suite: String,
        #[arg(long, default_value_t = 1)]
        seed: u64,
        #[arg(long, default_value_t = 100)]
        samples: usize,
        /// Debug flag: scale R by 1.1 to confirm the anomaly detector fires.
        #[arg(long, default_value_t = false)]
        corrupt_r: bool,
        /// Write the JSON report here (defaults to stdout only).
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Print a deterministic JSON description of a catalogue model.
    Describe {
        /// Model name, e.g. A2-split, A3-compact-folded, A1-split-rational,
        /// 2xA1-split-cyclic.
        #[arg(long)]
        model: String,
        /// Also write describe.json and the R(q_ref) operator CSV here.
        #[arg(long)]
        out_dir: Option<PathBuf>,
    },
}

fn main() -> ExitCode {
    if let Ok(threads) = std::env::var("CALOGERO_THREADS") {
        if let Ok(n) = threads.parse::<usize>() {
            let _ = rayon::ThreadPoolBuilder::new()
                .num_threads(n)
                .build_global();
        }
    }
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(err) => {
            use clap::error::ErrorKind;
            let code = match err.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => 0,
                _ => EXIT_CONFIG,
            };
            let _ = err.print();
            return ExitCode::from(code as u8);
        }
    };
    let code = match run(cli) {
        Ok(code) => code,
        Err(err) => {
            eprintln!("error: {err}");
            exit_code_for(&err)
        }
    };
    ExitCode::from(code as u8)
}

fn run(cli: Cli) -> calogero::Result<i32> {
    match cli.command {
        Command::Simulate { config } => {
            let text = std::fs::read_to_string(&config)
                .map_err(|e| calogero::Error::Config(format!("cannot read {config:?}: {e}")))?;
            let cfg = RunConfig::from_json(&text)?;
            let outcome = run_simulate(&cfg)?;
            for path in &outcome.csv_paths {
                println!("wrote {}", path.display());
            }
            if let Some(path) = &outcome.report_path {
                println!("wrote {}", path.display());
            }
            for msg in &outcome.messages {
                eprintln!("{msg}");
            }
            if let Some(report) = &outcome.report {
                println!(
                    "cross-solver: pass={} max_h_dev={:.3e} max_eig_dev={:.3e}",
                    report.pass, report.max_h_dev, report.max_eig_dev
                );
            }
            Ok(outcome.exit_code)
        }
        Command::Verify {
            suite,
            seed,
            samples,
            corrupt_r,
            out,
        } => {
            let report = run_verify(&suite, seed, samples, corrupt_r)?;
            let text = serde_json::to_string_pretty(&report)
                .map_err(|e| calogero::Error::Config(format!("report serialization: {e}")))?;
            if let Some(path) = &out {
                write_atomic(path, &text)?;
                println!("wrote {}", path.display());
            } else {
                println!("{text}");
            }
            for check in &report.checks {
                if !check.pass {
                    eprintln!(
                        "FAIL {}/{} [{}]: residual {:.3e} vs tolerance {:.3e}{}",
                        check.suite,
                        check.name,
                        check.model,
                        check.residual,
                        check.tolerance,
                        if check.must_exceed {
                            " (must exceed)"
                        } else {
                            ""
                        }
                    );
                }
            }
            Ok(if report.all_pass {
                EXIT_OK
            } else {
                EXIT_TOLERANCE
            })
        }
        Command::Describe { model, out_dir } => {
            let (out, r_matrix) = run_describe(&model)?;
            let text = serde_json::to_string_pretty(&out)
                .map_err(|e| calogero::Error::Config(format!("serialization: {e}")))?;
            println!("{text}");
            if let Some(dir) = out_dir {
                std::fs::create_dir_all(&dir)?;
                write_atomic(&dir.join("describe.json"), &text)?;
                write_atomic(&dir.join("r_operator.csv"), &operator_csv(&r_matrix))?;
                println!("wrote {}", dir.join("describe.json").display());
                println!("wrote {}", dir.join("r_operator.csv").display());
            }
            Ok(EXIT_OK)
        }
    }
}
