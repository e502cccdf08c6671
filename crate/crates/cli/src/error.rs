use std::io;
use std::path::{Path, PathBuf};

use evw::EvwError;

/// Process exit statuses.
pub mod exit {
    pub const OK: u8 = 0;
    pub const INTERNAL: u8 = 1;
    pub const INVALID_INPUT: u8 = 2;
    pub const DETECTION: u8 = 3;
    pub const FRAME: u8 = 4;
    pub const IO: u8 = 5;
}

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{0}")]
    Invalid(String),
    #[error("{}: {source}", path.display())]
    Io { path: PathBuf, source: io::Error },
    #[error(transparent)]
    Core(#[from] EvwError),
}

impl CliError {
    pub fn invalid(msg: impl Into<String>) -> Self {
        CliError::Invalid(msg.into())
    }

    pub fn io(path: &Path, source: io::Error) -> Self {
        CliError::Io {
            path: path.to_path_buf(),
            source,
        }
    }

    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Invalid(_) => exit::INVALID_INPUT,
            CliError::Io { .. } => exit::IO,
            CliError::Core(e) => match e {
                EvwError::InvalidInput(_) => exit::INVALID_INPUT,
                EvwError::NoModes { .. } => exit::DETECTION,
                EvwError::FrameFailure { .. } => exit::FRAME,
                EvwError::Internal(_) => exit::INTERNAL,
            },
        }
    }
}

pub type Result<T, E = CliError> = std::result::Result<T, E>;
