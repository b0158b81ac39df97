//! `oamch`: command-line front end for the OAM Clauser-Horne simulator.
//!
//! Exit codes: 0 success, 1 assertion or validation failure, 2 configuration
//! error, 3 I/O error.

mod commands;
mod config;
mod report;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use thiserror::Error;

use crate::config::Format;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Assertion(String),
    #[error("config error: {0}")]
    Config(String),
    #[error("i/o error: {0}")]
    Io(String),
}

impl CliError {
    fn exit_code(&self) -> u8 {
        match self {
            CliError::Assertion(_) => 1,
            CliError::Config(_) => 2,
            CliError::Io(_) => 3,
        }
    }
}

#[derive(Debug, Parser)]
#[command(name = "oamch", version, about = "Clauser-Horne test simulator for OAM-entangled photon pairs")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Args)]
pub struct Common {
    /// JSON configuration file.
    #[arg(long, value_name = "PATH", global = true)]
    config: Option<PathBuf>,
    /// Write the report (or the scan CSV) to this file instead of stdout.
    #[arg(long, value_name = "PATH", global = true)]
    out: Option<PathBuf>,
    /// Output format.
    #[arg(long, value_enum, global = true)]
    format: Option<Format>,
    /// Override one configuration value, e.g. `--set ch.theta_b=22.5deg`.
    #[arg(long = "set", value_name = "SECTION.KEY=VALUE", global = true)]
    overrides: Vec<String>,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Coincidence probabilities, normalized amplitudes and marginals for one setting.
    Probe {
        /// Also evaluate the closed-form probabilities (half-integer step index, zero auxiliary phases).
        #[arg(long)]
        closed_form: bool,
        #[command(flatten)]
        common: Common,
    },
    /// The six CH probabilities and the parameter S.
    Ch {
        /// Exit with status 1 unless S > 0.
        #[arg(long)]
        assert_violation: bool,
        #[command(flatten)]
        common: Common,
    },
    /// Simulated counting runs and the estimate of S.
    Mc {
        #[command(flatten)]
        common: Common,
    },
    /// S over a grid of plate orientations.
    Scan {
        #[command(flatten)]
        common: Common,
    },
    /// Analytic-versus-quadrature oracle suites.
    Validate {
        /// Comma-separated subset of: azimuthal, coincidence, appendix-a, sign.
        #[arg(long, value_delimiter = ',')]
        suites: Vec<String>,
        /// Replace the overlap integral by its opposite-sign variant.
        #[arg(long, hide = true)]
        inject_flipped_sign: bool,
        #[command(flatten)]
        common: Common,
    },
}

fn run(cli: Cli) -> Result<(), CliError> {
    match cli.command {
        Command::Probe { closed_form, common } => commands::probe(&common, closed_form),
        Command::Ch { assert_violation, common } => commands::ch(&common, assert_violation),
        Command::Mc { common } => commands::mc(&common),
        Command::Scan { common } => commands::scan(&common),
        Command::Validate {
            suites,
            inject_flipped_sign,
            common,
        } => commands::validate(&common, &suites, inject_flipped_sign),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("oamch: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
