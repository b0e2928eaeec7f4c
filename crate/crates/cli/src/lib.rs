//! The `spdmean` command-line tool.
//!
//! Exit codes: 0 on success, 1 for bad arguments or input, 2 when a solver
//! fails (a JSON error object is written to standard output), and 3 when the
//! `axioms` subcommand finds a failing check.

pub mod commands;
pub mod input;

use std::ffi::OsString;
use std::fs::File;
use std::io::{Read, Write};
use std::path::PathBuf;

use clap::{Parser, Subcommand, ValueEnum};
use thiserror::Error;

pub const EXIT_OK: i32 = 0;
pub const EXIT_INPUT: i32 = 1;
pub const EXIT_SOLVER: i32 = 2;
pub const EXIT_CHECKS: i32 = 3;

#[derive(Debug, Parser)]
#[command(
    name = "spdmean",
    version,
    about = "Geometric means of positive definite matrices"
)]
pub struct Cli {
    /// Input document; standard input when absent.
    #[arg(long, global = true)]
    pub input: Option<PathBuf>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Emit random positive definite matrices exp(spread * G).
    Gen {
        #[arg(long)]
        dim: usize,
        #[arg(long)]
        count: usize,
        #[arg(long)]
        seed: u64,
        #[arg(long, default_value_t = 0.5)]
        spread: f64,
    },
    /// Compute a mean of the input matrices.
    Mean {
        #[arg(long, value_enum)]
        kind: MeanKind,
        /// Exponent of the power mean.
        #[arg(long)]
        t: Option<f64>,
        #[arg(long)]
        tol: Option<f64>,
        #[arg(long)]
        max_iter: Option<usize>,
    },
    /// Pairwise distances, or the Wasserstein distance to a second document.
    Dist {
        #[arg(long, value_enum)]
        metric: DistMetric,
        /// Second measure for the Wasserstein distance.
        #[arg(long)]
        other: Option<PathBuf>,
    },
    /// Emit a walk trace as CSV.
    Walk {
        #[arg(long)]
        steps: usize,
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long)]
        deterministic: bool,
        /// Record distances to this target instead of full matrices.
        #[arg(long, value_enum)]
        target: Option<WalkTarget>,
    },
    /// Run the property suite on seeded random tuples.
    Axioms {
        #[arg(long, value_enum)]
        mean: AxiomMean,
        #[arg(long)]
        seed: u64,
        #[arg(long)]
        trials: usize,
        #[arg(long, default_value_t = 3)]
        dim: usize,
        /// Tuple size.
        #[arg(long, default_value_t = 3)]
        n: usize,
    },
    /// Emit the power-mean gaps to the Karcher mean as CSV.
    Bench {
        #[arg(long, value_delimiter = ',', required = true)]
        schedule: Vec<f64>,
    },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum MeanKind {
    Arithmetic,
    Harmonic,
    Geometric,
    Alm,
    Inductive,
    Power,
    Karcher,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum DistMetric {
    Riemannian,
    Thompson,
    Wasserstein,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum WalkTarget {
    Karcher,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum AxiomMean {
    Alm,
    Karcher,
}

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Input(String),
    #[error("{0}")]
    Solver(String),
    #[error("output error: {0}")]
    Io(#[from] std::io::Error),
}

impl From<spd_means::Error> for CliError {
    fn from(e: spd_means::Error) -> Self {
        match e {
            spd_means::Error::NoConvergence { .. }
            | spd_means::Error::EigenNoConvergence { .. } => CliError::Solver(e.to_string()),
            other => CliError::Input(other.to_string()),
        }
    }
}

impl From<csv::Error> for CliError {
    fn from(e: csv::Error) -> Self {
        CliError::Io(std::io::Error::other(e))
    }
}

impl From<serde_json::Error> for CliError {
    fn from(e: serde_json::Error) -> Self {
        CliError::Io(std::io::Error::other(e))
    }
}

/// Reads the input document from `--input` or from `stdin`.
pub(crate) fn read_input(
    cli_input: &Option<PathBuf>,
    stdin: &mut dyn Read,
) -> Result<input::Input, CliError> {
    match cli_input {
        Some(path) => {
            let file = File::open(path)
                .map_err(|e| CliError::Input(format!("cannot open {}: {e}", path.display())))?;
            input::parse_input(file).map_err(CliError::Input)
        }
        None => input::parse_input(stdin).map_err(CliError::Input),
    }
}

/// Runs the tool on `args` (program name first) and returns the exit code.
pub fn run<I, T>(
    args: I,
    stdin: &mut dyn Read,
    stdout: &mut dyn Write,
    stderr: &mut dyn Write,
) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_INPUT } else { EXIT_OK };
            let text = e.render().to_string();
            let _ = if e.use_stderr() {
                stderr.write_all(text.as_bytes())
            } else {
                stdout.write_all(text.as_bytes())
            };
            return code;
        }
    };
    match commands::dispatch(&cli, stdin, stdout) {
        Ok(code) => code,
        Err(CliError::Solver(message)) => {
            let body = serde_json::json!({ "error": { "kind": "solver", "message": message } });
            let _ = writeln!(
                stdout,
                "{}",
                serde_json::to_string_pretty(&body).unwrap_or_default()
            );
            EXIT_SOLVER
        }
        Err(e) => {
            let _ = writeln!(stderr, "error: {e}");
            EXIT_INPUT
        }
    }
}
