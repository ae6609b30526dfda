//! Batch front-end for fast-forward spin driving: configuration, subcommands
//! and artifact writing.

pub mod commands;
pub mod config;
pub mod output;
pub mod verify;

use ffspin_core::Error;

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("configuration error: {0}")]
    Config(String),
    #[error("output error: {0}")]
    Io(String),
    #[error("no selection is accepted: {0}")]
    NoSelection(String),
    #[error("verification failed: {0}")]
    Verification(String),
    #[error(transparent)]
    Core(#[from] Error),
}

impl CliError {
    /// `1` verification failure, `2` configuration error, `3` solver rejection.
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Verification(_) => 1,
            CliError::Config(_) | CliError::Io(_) => 2,
            CliError::NoSelection(_) => 3,
            CliError::Core(e) => match e {
                Error::TableEntry { .. } => 1,
                Error::Config(_)
                | Error::Domain { .. }
                | Error::Range { .. }
                | Error::StepSize { .. }
                | Error::Arity { .. }
                | Error::NotInBasis(_) => 2,
                Error::Rejected { .. }
                | Error::Degenerate { .. }
                | Error::Consistency { .. }
                | Error::GaugeInstability { .. }
                | Error::PhaseResidue { .. }
                | Error::SymmetryViolation { .. } => 3,
            },
        }
    }
}
