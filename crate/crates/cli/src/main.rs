//! `cascade-rd`: batch front end for the region evaluators.
//!
//! Exit status: 0 success, 1 invalid input, 2 infeasible instance,
//! 3 verification failure.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

mod commands;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, ValueEnum};

/// Seed used when `--seed` is not given.
pub const DEFAULT_SEED: u64 = 20_240_917;

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Command {
    GaussianPoint,
    GaussianSweep,
    GaussianVerify,
    DiscreteEval,
    DiscreteBoundary,
    TriangularSearch,
    CoordinationEval,
    Pareto,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Csv,
    Json,
}

#[derive(Debug, Parser)]
#[command(name = "cascade-rd", version, about = "Rate regions for cascade and triangular source coding")]
pub struct RunConfig {
    #[arg(long, value_enum)]
    pub command: Command,
    /// Instance or problem file (JSON).
    #[arg(long)]
    pub input: Option<PathBuf>,
    /// Destination file; standard output when omitted.
    #[arg(long)]
    pub output: Option<PathBuf>,
    #[arg(long, value_enum, default_value = "csv")]
    pub format: Format,
    #[arg(long, default_value_t = DEFAULT_SEED)]
    pub seed: u64,
    /// Random instances for gaussian-verify.
    #[arg(long, default_value_t = 200)]
    pub instances: usize,
    /// Lattice step for the grid oracle; discrete-boundary adds the oracle
    /// frontier only when this is given.
    #[arg(long)]
    pub grid_step: Option<f64>,
    /// Comma-separated weights for the boundary sweep.
    #[arg(long, value_delimiter = ',')]
    pub lambdas: Option<Vec<f64>>,
    #[arg(long)]
    pub u_size: Option<usize>,
    /// Largest accepted closed-form vs oracle deviation, bits.
    #[arg(long, default_value_t = 1e-3)]
    pub tolerance: f64,
    /// Sweep range for gaussian-sweep; the start defaults to the instance's R₂.
    #[arg(long)]
    pub r2_min: Option<f64>,
    #[arg(long, default_value_t = 3.0)]
    pub r2_max: f64,
    #[arg(long, default_value_t = 0.01)]
    pub r2_step: f64,
}

#[derive(Debug)]
pub enum Failure {
    Invalid(String),
    Infeasible(String),
    Verification(String),
}

impl Failure {
    fn code(&self) -> u8 {
        match self {
            Self::Invalid(_) => 1,
            Self::Infeasible(_) => 2,
            Self::Verification(_) => 3,
        }
    }

    fn message(&self) -> &str {
        match self {
            Self::Invalid(m) | Self::Infeasible(m) | Self::Verification(m) => m,
        }
    }
}

impl From<cascade_rd::Error> for Failure {
    fn from(e: cascade_rd::Error) -> Self {
        match e {
            cascade_rd::Error::Infeasible(m) => Self::Infeasible(m),
            _ => Self::Invalid(e.to_string()),
        }
    }
}

fn configure_workers() -> Result<(), Failure> {
    let Ok(raw) = std::env::var("RD_NUM_WORKERS") else {
        return Ok(());
    };
    let n: usize = raw
        .trim()
        .parse()
        .ok()
        .filter(|&n| n > 0)
        .ok_or_else(|| Failure::Invalid(format!("RD_NUM_WORKERS must be a positive integer, got {raw:?}")))?;
    rayon::ThreadPoolBuilder::new()
        .num_threads(n)
        .build_global()
        .map_err(|e| Failure::Invalid(format!("cannot start {n} workers: {e}")))
}

fn main() -> ExitCode {
    let config = RunConfig::parse();
    match configure_workers().and_then(|()| commands::run(&config)) {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            let kind = match f {
                Failure::Invalid(_) => "error",
                Failure::Infeasible(_) => "infeasible",
                Failure::Verification(_) => "verification failed",
            };
            eprintln!("{kind}: {}", f.message());
            ExitCode::from(f.code())
        }
    }
}
