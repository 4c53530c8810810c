//! `fellap`: batch driver for validation, globalization, kernel and approximation-property
//! reports. Results go to CSV (stdout or `--out`), a human summary goes to stderr.
//!
//! Exit codes: 0 pass, 1 validation failure, 2 configuration error, 3 unsupported.

mod commands;
mod config;
mod output;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

#[derive(Debug)]
pub enum CliError {
    Config(String),
    Io(String),
    Validation(String),
    Unsupported(String),
}

impl CliError {
    fn code(&self) -> u8 {
        match self {
            CliError::Validation(_) => 1,
            CliError::Config(_) | CliError::Io(_) => 2,
            CliError::Unsupported(_) => 3,
        }
    }
}

impl std::fmt::Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            CliError::Config(m) => write!(f, "config error: {m}"),
            CliError::Io(m) => write!(f, "i/o error: {m}"),
            CliError::Validation(m) => write!(f, "validation failed: {m}"),
            CliError::Unsupported(m) => write!(f, "unsupported: {m}"),
        }
    }
}

#[derive(Parser, Debug)]
#[command(name = "fellap", version, about = "Partial actions, Fell bundles and approximation-property reports")]
pub struct Cli {
    /// JSON config with named groups, algebras, actions, twists, bundles and witness families.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    /// Seed for every randomized check.
    #[arg(long, global = true, default_value_t = 0)]
    pub seed: u64,
    /// CSV output path (stdout when absent).
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    /// Tolerance; each command has its own default.
    #[arg(long, global = true)]
    pub tol: Option<f64>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Check the axioms of an action, twist or bundle (`kind:name` disambiguates).
    Validate {
        target: String,
        /// Ball radius for checks over infinite groups.
        #[arg(long, default_value_t = 1)]
        radius: usize,
        /// Random samples per bundle identity.
        #[arg(long, default_value_t = 40)]
        samples: usize,
    },
    /// Build the enveloping global action of a partial action of a finite group.
    Globalize {
        action: String,
        /// Write a copy of the config with the global action added.
        #[arg(long)]
        emit_config: Option<PathBuf>,
    },
    /// Defect table of a witness family.
    ApCheck {
        /// Bundle ref, or builtin:cantor:N.
        #[arg(long)]
        bundle: String,
        /// Family ref, builtin:uniform, builtin:folner:N or builtin:cuntz:I.
        #[arg(long)]
        witness: String,
        /// basis[:R], or elements separated by ';'.
        #[arg(long)]
        targets: Option<String>,
        /// Largest admissible witness bound.
        #[arg(long, default_value_t = 1.0 + 1e-9)]
        cap: f64,
    },
    /// Kernel algebra M_F(B) on balls of growing radius.
    Kernels {
        #[arg(long)]
        bundle: String,
        #[arg(long)]
        window: usize,
        #[arg(long, default_value_t = 3)]
        samples: usize,
    },
    /// Cuntz witness defects against the closed form.
    CuntzAp {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        imax: usize,
        /// Reduced words separated by ','.
        #[arg(long, default_value = "a")]
        targets: String,
    },
    /// Arrow table of the truncated spectral groupoid.
    Groupoid {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        depth: usize,
        #[arg(long)]
        radius: usize,
    },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match commands::run(&cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("{e}");
            ExitCode::from(e.code())
        }
    }
}
