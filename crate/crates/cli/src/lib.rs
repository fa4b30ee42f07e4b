//! Command-line front end for the domain kernel, norm and projection experiments.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod commands;
pub mod config;
pub mod output;

use std::fmt;
use std::path::PathBuf;

use clap::{Parser, Subcommand};

use crate::config::FileConfig;
use crate::output::Format;

/// Exit status of a run.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Status {
    Ok = 0,
    ToleranceFailure = 1,
    ConfigError = 2,
    Numerical = 3,
    Internal = 4,
}

#[derive(Debug, Clone, PartialEq)]
pub struct CliError {
    pub status: Status,
    pub message: String,
}

impl CliError {
    pub fn config(message: impl Into<String>) -> Self {
        CliError {
            status: Status::ConfigError,
            message: message.into(),
        }
    }

    pub fn numerical(message: impl Into<String>) -> Self {
        CliError {
            status: Status::Numerical,
            message: message.into(),
        }
    }

    pub fn internal(message: impl Into<String>) -> Self {
        CliError {
            status: Status::Internal,
            message: message.into(),
        }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.message)
    }
}

/// Rows of one subcommand plus the checks that failed their tolerance.
#[derive(Debug, Clone)]
pub struct Report<R> {
    pub rows: Vec<R>,
    pub failures: Vec<String>,
}

#[derive(Debug, Parser)]
#[command(
    name = "fbh",
    version,
    about = "Kernel, norm and projection experiments on Fock-Bargmann-Hartogs domains"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
    /// TOML file with one section per subcommand; flags take precedence.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    /// Output file; standard output when absent.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    #[arg(long, global = true, value_enum, default_value_t = Format::Csv)]
    pub format: Format,
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    /// Monte Carlo sample count.
    #[arg(long, global = true)]
    pub samples: Option<usize>,
    /// Worker threads; results do not depend on this.
    #[arg(long, global = true)]
    pub threads: Option<usize>,
    /// Add the basis-sum oracle columns (kernel).
    #[arg(long, global = true)]
    pub oracle: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Subcommand)]
pub enum Command {
    /// Evaluate the domain kernel at point pairs.
    Kernel,
    /// Monomial norms: closed form against quadrature.
    Norms,
    /// Restriction, cylinder and sub-mean identities.
    Identities,
    /// Lp ratio sweep of the tuned Gaussian witness family.
    #[command(name = "lp-sweep")]
    LpSweep,
}

impl Command {
    pub fn name(&self) -> &'static str {
        match self {
            Command::Kernel => "kernel",
            Command::Norms => "norms",
            Command::Identities => "identities",
            Command::LpSweep => "lp-sweep",
        }
    }
}

fn reject_flag(present: bool, flag: &str, command: Command) -> Result<(), CliError> {
    if present {
        Err(CliError::config(format!(
            "{flag} does not apply to {}",
            command.name()
        )))
    } else {
        Ok(())
    }
}

/// Validates, computes and renders. Nothing is written here.
pub fn execute(cli: &Cli) -> Result<(Vec<u8>, Vec<String>), CliError> {
    let file = config::load(cli.config.as_deref())?;
    if let Some(t) = cli.threads {
        if t == 0 {
            return Err(CliError::config("--threads must be positive"));
        }
    }
    let FileConfig {
        kernel,
        norms,
        identities,
        lp_sweep,
    } = file;
    let name = cli.command.name();
    match cli.command {
        Command::Kernel => {
            reject_flag(cli.seed.is_some(), "--seed", cli.command)?;
            reject_flag(cli.samples.is_some(), "--samples", cli.command)?;
            let mut cfg = kernel.unwrap_or_default();
            cfg.oracle |= cli.oracle;
            let report = commands::kernel::run(&cfg)?;
            let meta = output::Meta::new(name, None, &cfg);
            Ok((
                output::render(cli.format, &meta, &report.rows)?,
                report.failures,
            ))
        }
        Command::Norms => {
            reject_flag(cli.oracle, "--oracle", cli.command)?;
            let mut cfg = norms.unwrap_or_default();
            cfg.seed = cli.seed.unwrap_or(cfg.seed);
            cfg.samples = cli.samples.unwrap_or(cfg.samples);
            let report = commands::norms::run(&cfg)?;
            let meta = output::Meta::new(name, Some(cfg.seed), &cfg);
            Ok((
                output::render(cli.format, &meta, &report.rows)?,
                report.failures,
            ))
        }
        Command::Identities => {
            reject_flag(cli.oracle, "--oracle", cli.command)?;
            let mut cfg = identities.unwrap_or_default();
            cfg.seed = cli.seed.unwrap_or(cfg.seed);
            cfg.samples = cli.samples.unwrap_or(cfg.samples);
            let report = commands::identities::run(&cfg)?;
            let meta = output::Meta::new(name, Some(cfg.seed), &cfg);
            Ok((
                output::render(cli.format, &meta, &report.rows)?,
                report.failures,
            ))
        }
        Command::LpSweep => {
            reject_flag(cli.oracle, "--oracle", cli.command)?;
            reject_flag(cli.seed.is_some(), "--seed", cli.command)?;
            reject_flag(cli.samples.is_some(), "--samples", cli.command)?;
            let cfg = lp_sweep.unwrap_or_default();
            let report = commands::lp_sweep::run(&cfg)?;
            let meta = output::Meta::new(name, None, &cfg);
            Ok((
                output::render(cli.format, &meta, &report.rows)?,
                report.failures,
            ))
        }
    }
}

/// Maps a library error raised during computation to an exit status.
pub(crate) fn numerical(context: impl fmt::Display, e: fbh_core::Error) -> CliError {
    CliError::numerical(format!("{context}: {e}"))
}
