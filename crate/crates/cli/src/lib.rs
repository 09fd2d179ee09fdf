//! Command-line front end: JSON-configured runs of the band, design,
//! spectrum, and ground-state pipelines with CSV/JSON emission.

// `!(x > 0.0)` deliberately treats NaN as out of range.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

use thiserror::Error;

pub mod commands;
pub mod config;
pub mod io;

pub use config::RunConfig;

/// CLI failure classes, mapped onto process exit codes:
/// `1` configuration/IO, `2` hypothesis violation, `3` non-convergence.
#[derive(Debug, Error)]
pub enum CliError {
    #[error("configuration error: {0}")]
    Config(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error("hypothesis violation: {0}")]
    Hypothesis(String),
    #[error("did not converge: {0}")]
    NonConvergence(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Config(_) | CliError::Io(_) => 1,
            CliError::Hypothesis(_) => 2,
            CliError::NonConvergence(_) => 3,
        }
    }
}
