//! Command-line front end: configuration, subcommands and report bundles.
//!
//! Exit codes are a stable contract: 0 success, 2 infeasible design or
//! missed error budget, 3 input error.

pub mod commands;
pub mod config;
pub mod report;

use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};
use thiserror::Error;

pub use commands::{execute, Outcome, Status};
pub use config::RunConfig;
pub use report::ReportBundle;

pub const EXIT_OK: i32 = 0;
pub const EXIT_INFEASIBLE: i32 = 2;
pub const EXIT_INPUT: i32 = 3;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Input(String),
    #[error("{0}")]
    Infeasible(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Input(_) => EXIT_INPUT,
            CliError::Infeasible(_) => EXIT_INFEASIBLE,
        }
    }
}

impl From<ftkit::Error> for CliError {
    fn from(e: ftkit::Error) -> Self {
        match e {
            ftkit::Error::NoFeasiblePoint { .. } => CliError::Infeasible(e.to_string()),
            _ => CliError::Input(e.to_string()),
        }
    }
}

#[derive(Debug, Parser)]
#[command(name = "ftkit", version, about = "Design, simulate and calibrate an optical six-axis force/torque sensor")]
pub struct Cli {
    #[command(flatten)]
    pub global: GlobalArgs,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Args)]
pub struct GlobalArgs {
    /// JSON run configuration; defaults apply to every missing key.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    /// Overrides the configured seed.
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    /// Print the report as JSON instead of a table.
    #[arg(long, global = true)]
    pub json: bool,
    /// Directory for output files; created if missing.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Compliance, sensitivity matrix, metrics and constraints of one design.
    Evaluate {
        /// Seven comma-separated values l1,l2,b1,b2,h,r,rs2 in mm.
        #[arg(long, value_delimiter = ',')]
        design: Option<Vec<f64>>,
        /// Horizontal photocoupler offset above mid-height, mm.
        #[arg(long)]
        c: Option<f64>,
    },
    /// Constrained global search for one objective, or all of them.
    Optimize {
        /// Objective name such as COND or CONDxS2_over_NUC2; the configured one if absent.
        #[arg(long)]
        objective: Option<String>,
        /// Run every objective and write the design table.
        #[arg(long)]
        table2: bool,
        /// Number of search starts.
        #[arg(long)]
        starts: Option<usize>,
        /// Horizontal photocoupler offset as a fraction of the beam height.
        #[arg(long)]
        c_frac: Option<f64>,
    },
    /// Write a bench sweep, a calibration ramp and a scenario trace.
    Simulate {
        /// static-ramp, gait or gravel-drift.
        #[arg(long)]
        scenario: Option<String>,
    },
    /// Fit the calibration model and score it on test traces.
    Calibrate {
        /// Sweep CSV (channel,v,gap_mm).
        #[arg(long)]
        sweep: PathBuf,
        /// Trace with reference wrench used for the decoupling fit.
        #[arg(long)]
        trace: PathBuf,
        /// Traces to score; the fit trace if none.
        #[arg(long)]
        test: Vec<PathBuf>,
    },
    /// Re-render a saved JSON report.
    Report {
        input: PathBuf,
    },
}

/// Size the global worker pool from `FTKIT_THREADS` if set.
pub fn configure_threads() -> Result<(), CliError> {
    let Ok(v) = std::env::var("FTKIT_THREADS") else {
        return Ok(());
    };
    let n: usize = v
        .trim()
        .parse()
        .ok()
        .filter(|n| *n > 0)
        .ok_or_else(|| CliError::Input(format!("FTKIT_THREADS must be a positive integer, got `{v}`")))?;
    rayon::ThreadPoolBuilder::new()
        .num_threads(n)
        .build_global()
        .map_err(|e| CliError::Input(e.to_string()))
}
