use std::io;

use thiserror::Error;

/// Process exit codes.
pub const EXIT_FAILURE: u8 = 1;
pub const EXIT_USAGE: u8 = 2;
pub const EXIT_DIM_CAP: u8 = 3;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error(transparent)]
    Core(#[from] gbi_core::Error),
    #[error("cannot write {path}: {source}")]
    Io { path: String, source: io::Error },
    #[error("cannot encode output: {0}")]
    Encode(String),
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        use gbi_core::Error as E;
        match self {
            CliError::Usage(_) => EXIT_USAGE,
            CliError::Core(E::DimensionCap { .. }) => EXIT_DIM_CAP,
            CliError::Core(
                E::InvalidSpin(_)
                | E::InvalidAngle { .. }
                | E::TooFewParticles(_)
                | E::DirectionCount { .. }
                | E::Unsupported(_)
                | E::IntegerSpin(_)
                | E::InvalidConfig(_),
            ) => EXIT_USAGE,
            _ => EXIT_FAILURE,
        }
    }
}

impl From<serde_json::Error> for CliError {
    fn from(e: serde_json::Error) -> Self {
        CliError::Encode(e.to_string())
    }
}

impl From<csv::Error> for CliError {
    fn from(e: csv::Error) -> Self {
        CliError::Encode(e.to_string())
    }
}
