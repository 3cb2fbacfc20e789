//! The `ebc` command line: spectrum reports, time evolution, endpoint
//! limiting-absorption tables and the validation suites.
//!
//! Exit codes: 0 on success, 1 when a check fails, 2 for configuration and
//! I/O errors.

pub mod commands;
pub mod config;
pub mod output;

use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use ebc_core::validation::Suite;

pub use commands::{run_evolve, run_lap, run_spectrum, run_validate, Outcome};
pub use config::{RunConfig, Solver};

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("config error: {0}")]
    Config(String),
    #[error("{path}: {source}")]
    Io { path: PathBuf, source: std::io::Error },
    #[error(transparent)]
    Core(#[from] ebc_core::Error),
}

impl CliError {
    pub fn io(path: &Path, source: std::io::Error) -> Self {
        CliError::Io { path: path.to_path_buf(), source }
    }

    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Config(_) | CliError::Io { .. } => 2,
            CliError::Core(ebc_core::Error::InvalidParams(_) | ebc_core::Error::InvalidGrid(_)) => 2,
            CliError::Core(_) => 1,
        }
    }
}

#[derive(Debug, Parser)]
#[command(name = "ebc", version, about = "Stratified Couette flow: spectrum, evolution and endpoint checks")]
pub struct Cli {
    /// Worker threads (defaults to the number of cores).
    #[arg(long, global = true)]
    pub threads: Option<usize>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Discrete eigenvalues and the scan next to the essential spectrum, as JSON.
    Spectrum(SpectrumArgs),
    /// Norm time series as CSV.
    Evolve(EvolveArgs),
    /// Resolvent jump at the walls along a decreasing ε list, as JSON.
    Lap(LapArgs),
    /// Run a validation suite and print its report as JSON.
    Validate(ValidateArgs),
}

/// Mode and stratification, from a config file or flags (flags win).
#[derive(Debug, Args)]
pub struct Physical {
    #[arg(long)]
    pub config: Option<PathBuf>,
    #[arg(long)]
    pub m: Option<u32>,
    #[arg(long)]
    pub beta: Option<f64>,
}

impl Physical {
    pub fn resolve(&self) -> Result<RunConfig, CliError> {
        let mut cfg = match &self.config {
            Some(path) => RunConfig::load(path)?,
            None => {
                let (Some(m), Some(beta)) = (self.m, self.beta) else {
                    return Err(CliError::Config("give --config or both --m and --beta".into()));
                };
                RunConfig::new(m, beta)
            }
        };
        if let Some(m) = self.m {
            cfg.m = m;
        }
        if let Some(beta) = self.beta {
            cfg.beta = beta;
        }
        cfg.validate()?;
        Ok(cfg)
    }
}

#[derive(Debug, Args)]
pub struct SpectrumArgs {
    #[command(flatten)]
    pub physical: Physical,
    #[arg(long, default_value_t = 3)]
    pub num_eigs: usize,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct EvolveArgs {
    #[command(flatten)]
    pub physical: Physical,
    #[arg(long, value_enum)]
    pub solver: Option<Solver>,
    #[arg(long)]
    pub t_end: Option<f64>,
    /// Number of time intervals; the series has `samples + 1` rows.
    #[arg(long)]
    pub samples: Option<usize>,
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// JSON summary with solver diagnostics and decay fits.
    #[arg(long)]
    pub report: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct LapArgs {
    #[command(flatten)]
    pub physical: Physical,
    /// Restrict the table to one wall.
    #[arg(long, value_parser = ["0", "1"])]
    pub endpoint: Option<String>,
    #[arg(long, value_delimiter = ',', default_values_t = [1e-2, 1e-3, 1e-4])]
    pub eps_list: Vec<f64>,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct ValidateArgs {
    #[arg(long, default_value = "all")]
    pub suite: Suite,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

pub fn run(cli: Cli) -> Result<Outcome, CliError> {
    if let Some(n) = cli.threads {
        if n == 0 {
            return Err(CliError::Config("--threads must be positive".into()));
        }
        rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
            .map_err(|e| CliError::Config(e.to_string()))?;
    }
    match cli.command {
        Command::Spectrum(a) => run_spectrum(&a.physical.resolve()?, a.num_eigs, a.out.as_deref()),
        Command::Evolve(a) => {
            let mut cfg = a.physical.resolve()?;
            cfg.solver = a.solver.or(cfg.solver);
            cfg.t_end = a.t_end.or(cfg.t_end);
            cfg.samples = a.samples.or(cfg.samples);
            cfg.out = a.out.or(cfg.out);
            cfg.report = a.report.or(cfg.report);
            cfg.validate()?;
            run_evolve(&cfg)
        }
        Command::Lap(a) => {
            let endpoint = a.endpoint.as_deref().map(|e| if e == "0" { 0.0 } else { 1.0 });
            run_lap(&a.physical.resolve()?, endpoint, &a.eps_list, a.out.as_deref())
        }
        Command::Validate(a) => run_validate(a.suite, a.out.as_deref()),
    }
}
