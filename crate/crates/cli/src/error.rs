use std::path::PathBuf;

use thiserror::Error;

/// Exit status for usage and domain errors.
pub const EXIT_USAGE: i32 = 2;
/// Exit status for computational failures.
pub const EXIT_FAILURE: i32 = 3;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),

    #[error(transparent)]
    Core(#[from] qcrb_core::Error),

    #[error("oracle failed: {0}")]
    Oracle(String),

    #[error("cannot read parameter file {path}: {source}")]
    ParamsFile {
        path: PathBuf,
        source: std::io::Error,
    },

    #[error("malformed parameter file {path}: {source}")]
    ParamsJson {
        path: PathBuf,
        source: serde_json::Error,
    },

    #[error("writing {path}: {source}")]
    Output {
        path: PathBuf,
        source: std::io::Error,
    },

    #[error(transparent)]
    Csv(#[from] csv::Error),

    #[error("check failed for family `{0}`")]
    CheckFailed(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        use qcrb_core::Error as E;
        match self {
            CliError::Usage(_) | CliError::ParamsFile { .. } | CliError::ParamsJson { .. } => {
                EXIT_USAGE
            }
            CliError::Core(
                E::InvalidParameter { .. } | E::Unphysical { .. } | E::Domain(_) | E::Shape(_),
            ) => EXIT_USAGE,
            _ => EXIT_FAILURE,
        }
    }
}

pub type Result<T> = std::result::Result<T, CliError>;
