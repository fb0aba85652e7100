//! Scenario runner for `colldec`: reads a JSON scenario, runs one command and
//! writes a summary or a CSV table.

use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::PathBuf;

use clap::{Parser, Subcommand};
use thiserror::Error;

pub mod commands;
pub mod output;
pub mod scenario;

pub use output::Csv;
pub use scenario::{Scenario, ScenarioFile, Units};

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Config(String),
    #[error("{0}")]
    Usage(String),
    #[error(transparent)]
    Compute(#[from] colldec::Error),
    #[error("output: {0}")]
    Io(#[from] io::Error),
}

impl CliError {
    /// 2 for usage and configuration errors, 3 for numerical non-convergence.
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Compute(e) if e.is_non_convergence() => 3,
            _ => 2,
        }
    }
}

#[derive(Debug, Clone, Parser)]
#[command(
    name = "colldec",
    version,
    about = "Collisional decoherence of a heavy particle in a dilute gas"
)]
pub struct Cli {
    /// JSON scenario file.
    #[arg(short, long, global = true)]
    pub scenario: Option<PathBuf>,
    /// Write CSV here instead of stdout.
    #[arg(short, long, global = true)]
    pub output: Option<PathBuf>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, PartialEq, Subcommand)]
pub enum Command {
    /// Diffusion parameter Lambda: closed form (hard sphere) and quadrature.
    Lambda,
    /// F(R) on a grid of separations.
    Fcurve {
        #[arg(long)]
        r_min: f64,
        #[arg(long)]
        r_max: f64,
        #[arg(long, value_parser = clap::value_parser!(u64).range(1..))]
        points: u64,
        /// Logarithmic spacing.
        #[arg(long)]
        log: bool,
        /// Add a Monte-Carlo estimate from the unreduced momentum-vector form
        /// (uses the scenario's `mc` block).
        #[arg(long)]
        mc: bool,
    },
    /// Large-separation rate n<v sigma>.
    Finf,
    /// Quantum and classical mean square displacement per axis.
    Msd {
        #[arg(long)]
        t_max: f64,
        #[arg(long, value_parser = clap::value_parser!(u64).range(1..))]
        points: u64,
    },
    /// The displacement coefficient from the quantum and the classical route.
    Crosscheck,
    /// Split-step evolution of a Gaussian packet under the master equation.
    Evolve {
        #[arg(long, value_parser = clap::value_parser!(u64).range(4..))]
        grid_n: u64,
        #[arg(long)]
        box_l: f64,
        #[arg(long)]
        dt: f64,
        #[arg(long)]
        steps: u64,
        /// Initial position spread; defaults to box_l / 20.
        #[arg(long)]
        sigma0: Option<f64>,
        #[arg(long, default_value_t = 1, value_parser = clap::value_parser!(u64).range(1..))]
        record_every: u64,
    },
    /// Langevin ensemble of the classical hard sphere.
    Langevin {
        #[arg(long, value_parser = clap::value_parser!(u64).range(1..))]
        traj: u64,
        #[arg(long)]
        dt: f64,
        #[arg(long)]
        t_end: f64,
        /// Steps between recorded times; defaults to a tenth of the run.
        #[arg(long, value_parser = clap::value_parser!(u64).range(1..))]
        record_every: Option<u64>,
        /// Overrides the scenario's `mc.seed`.
        #[arg(long)]
        seed: Option<u64>,
    },
}

/// Parse arguments, load the scenario, run, and write to `--output` or `out`.
pub fn run(cli: &Cli, out: &mut dyn Write) -> Result<(), CliError> {
    let path = cli
        .scenario
        .as_ref()
        .ok_or_else(|| CliError::Usage("--scenario <FILE> is required".into()))?;
    let scenario = Scenario::load(path)?;
    match &cli.output {
        Some(p) => {
            let f =
                File::create(p).map_err(|e| CliError::Config(format!("{}: {e}", p.display())))?;
            let mut w = BufWriter::new(f);
            commands::execute(&cli.command, &scenario, &mut w)?;
            w.flush()?;
            Ok(())
        }
        None => commands::execute(&cli.command, &scenario, out),
    }
}
