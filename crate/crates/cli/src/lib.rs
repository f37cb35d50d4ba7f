//! Command-line driver for `lifshitz-core`.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod commands;
pub mod config;

use thiserror::Error;

pub use commands::run;
pub use config::{parse_config, Command, OutputFormat, Regime, RunConfig};

/// Process exit status for bad invocations.
pub const EXIT_USAGE: u8 = 2;
/// Process exit status for failures after a valid invocation.
pub const EXIT_FAILURE: u8 = 1;

#[derive(Debug, Error)]
pub enum CliError {
    /// Bad flags, values or config file; the message is a single line.
    #[error("{0}")]
    Usage(String),
    /// `--help` or `--version`; the text goes to stdout and the exit is 0.
    #[error("{0}")]
    Info(String),
    #[error(transparent)]
    Core(#[from] lifshitz_core::Error),
    #[error("{path}: {source}")]
    Io {
        path: String,
        source: std::io::Error,
    },
    #[error("oracle mismatch: |dS| = {entropy:.3e}, max correlator deviation = {correlator:.3e}")]
    OracleMismatch { entropy: f64, correlator: f64 },
}

impl CliError {
    pub(crate) fn from_clap(e: clap::Error) -> Self {
        use clap::error::ErrorKind;
        match e.kind() {
            ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => {
                Self::Info(e.render().to_string())
            }
            ErrorKind::DisplayHelpOnMissingArgumentOrSubcommand => {
                Self::Usage("missing command; see --help".into())
            }
            _ => {
                let text = e.to_string();
                let line = text.lines().next().unwrap_or("invalid arguments");
                Self::Usage(line.trim_start_matches("error: ").to_string())
            }
        }
    }

    pub fn exit_code(&self) -> u8 {
        match self {
            Self::Info(_) => 0,
            Self::Usage(_) => EXIT_USAGE,
            _ => EXIT_FAILURE,
        }
    }
}

macro_rules! core_error {
    ($($t:ty),*) => {$(
        impl From<$t> for CliError {
            fn from(e: $t) -> Self {
                Self::Core(e.into())
            }
        }
    )*};
}

core_error!(
    lifshitz_core::LatticeError,
    lifshitz_core::EntropyError,
    lifshitz_core::OracleError,
    lifshitz_core::ThermalError,
    lifshitz_core::FitError,
    lifshitz_core::CmeraError,
    lifshitz_core::TableError,
    lifshitz_core::PlotError
);
