//! Library behind the `bshq` binary: argument parsing, the verification
//! scopes, and the JSON, CSV and text writers.
//!
//! Everything the binary does is reachable from here so that tests can run
//! commands in-process, including verification against deliberately broken
//! operators (see [`scopes::Mutation`]).

pub mod output;
pub mod scopes;

use clap::{Parser, Subcommand, ValueEnum};
use serde::Serialize;
use thiserror::Error;

use bshq_core::lattice::Hbar;

pub use scopes::{run_scope, Mutation, PiTarget, Scope};

/// Process exit status for a run where every check passed.
pub const EXIT_OK: i32 = 0;
/// At least one verification check failed.
pub const EXIT_FAILED: i32 = 1;
/// Bad flags or configuration.
pub const EXIT_USAGE: i32 = 2;

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Json,
    Csv,
    Text,
}

#[derive(Debug, Parser)]
#[command(name = "bshq", version, about = "Bohr-Sommerfeld-Heisenberg quantization of the 2-D harmonic oscillator")]
pub struct Cli {
    /// Value of ħ (positive).
    #[arg(long, global = true, default_value_t = 1.0, allow_negative_numbers = true)]
    pub hbar: f64,
    /// Residual tolerance for exact identities (positive).
    #[arg(long, global = true, default_value_t = 1e-10, allow_negative_numbers = true)]
    pub tol: f64,
    /// Oscillator shell cutoff: basis e_{m,n} with m+n <= nmax.
    #[arg(long, global = true, default_value_t = 20)]
    pub nmax: u32,
    /// Reduced orbit label e = qħ.
    #[arg(long, global = true, default_value_t = 20)]
    pub q: u32,
    /// Seed for randomized trials.
    #[arg(long, global = true, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, global = true, value_enum, default_value_t = Format::Json)]
    pub format: Format,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Subcommand)]
pub enum Command {
    /// Joint spectra of (Q_A1, Q_A2) and (Q_E, Q_L) up to the cutoff.
    Spectrum,
    /// Run the identity checks of one scope.
    Verify {
        #[arg(value_enum)]
        scope: Scope,
    },
    /// Table of the reduced shift coefficients b_p for one q.
    Bcoeff,
    /// Dimensions and commutants of H_q, H̃_q⁰, H̃_q¹ for q <= nmax.
    Multiplicity,
}

impl Command {
    fn label(self) -> &'static str {
        match self {
            Command::Spectrum => "spectrum",
            Command::Verify { .. } => "verify",
            Command::Bcoeff => "bcoeff",
            Command::Multiplicity => "multiplicity",
        }
    }
}

/// Validated configuration shared by every command.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct RunConfig {
    pub hbar: f64,
    pub tol: f64,
    pub n_max: u32,
    pub q: u32,
    pub seed: u64,
    pub format: Format,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig { hbar: 1.0, tol: 1e-10, n_max: 20, q: 20, seed: 0, format: Format::Json }
    }
}

impl RunConfig {
    pub fn validate(&self) -> Result<(), CliError> {
        Hbar::new(self.hbar).map_err(|e| CliError::Usage(e.to_string()))?;
        if !(self.tol.is_finite() && self.tol > 0.0) {
            return Err(CliError::Usage(format!("--tol must be a positive finite real, got {}", self.tol)));
        }
        Ok(())
    }

    pub fn hbar(&self) -> Hbar {
        Hbar::new(self.hbar).expect("validated")
    }
}

#[derive(Debug, Error, PartialEq)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    /// `--help` or `--version`: print and exit successfully.
    #[error("{0}")]
    Info(String),
    #[error("internal error: {0}")]
    Internal(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) => EXIT_USAGE,
            CliError::Info(_) => EXIT_OK,
            CliError::Internal(_) => EXIT_FAILED,
        }
    }
}

impl From<bshq_core::Error> for CliError {
    fn from(e: bshq_core::Error) -> Self {
        CliError::Internal(e.to_string())
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Invocation {
    pub command: Command,
    pub config: RunConfig,
}

pub fn parse_args<I, T>(args: I) -> Result<Invocation, CliError>
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = Cli::try_parse_from(args).map_err(|e| match e.kind() {
        clap::error::ErrorKind::DisplayHelp | clap::error::ErrorKind::DisplayVersion => CliError::Info(e.to_string()),
        _ => CliError::Usage(e.to_string()),
    })?;
    let config = RunConfig { hbar: cli.hbar, tol: cli.tol, n_max: cli.nmax, q: cli.q, seed: cli.seed, format: cli.format };
    config.validate()?;
    if matches!(cli.command, Command::Verify { .. }) && config.format == Format::Csv {
        return Err(CliError::Usage("verify reports are available as json or text, not csv".into()));
    }
    Ok(Invocation { command: cli.command, config })
}

/// Rendered output of one command and the exit status it implies.
#[derive(Debug, Clone, PartialEq)]
pub struct Outcome {
    pub stdout: String,
    pub exit_code: i32,
}

pub fn execute(inv: &Invocation) -> Result<Outcome, CliError> {
    execute_with(inv, None)
}

/// Like [`execute`], with an optional corruption of one π-operator entry
/// applied before verification.
pub fn execute_with(inv: &Invocation, mutation: Option<Mutation>) -> Result<Outcome, CliError> {
    let cfg = &inv.config;
    match inv.command {
        Command::Spectrum => Ok(Outcome { stdout: output::spectrum(cfg)?, exit_code: EXIT_OK }),
        Command::Bcoeff => Ok(Outcome { stdout: output::bcoeff(cfg)?, exit_code: EXIT_OK }),
        Command::Multiplicity => Ok(Outcome { stdout: output::multiplicity(cfg)?, exit_code: EXIT_OK }),
        Command::Verify { scope } => {
            let report = run_scope(scope, cfg, mutation)?;
            let exit_code = if report.all_passed() { EXIT_OK } else { EXIT_FAILED };
            Ok(Outcome { stdout: output::verification(cfg, inv.command.label(), scope, &report)?, exit_code })
        }
    }
}

/// Parses, runs, and maps every outcome to stdout/stderr text and an exit
/// code. This is the whole binary.
pub fn run<I, T>(args: I) -> (String, String, i32)
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    match parse_args(args).and_then(|inv| execute(&inv)) {
        Ok(out) => (out.stdout, String::new(), out.exit_code),
        Err(CliError::Info(text)) => (text, String::new(), EXIT_OK),
        Err(e) => (String::new(), format!("bshq: {e}\n"), e.exit_code()),
    }
}
