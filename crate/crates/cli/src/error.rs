use std::io;
use std::path::PathBuf;

/// Failures of a CLI run, each mapped to a process exit code.
#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    /// A reproduction anchor or oracle check did not hold.
    #[error("{0}")]
    Mismatch(String),
    #[error(transparent)]
    Core(#[from] dicke_core::Error),
    #[error("{}: {source}", path.display())]
    Io { path: PathBuf, source: io::Error },
}

pub type CliResult<T> = std::result::Result<T, CliError>;

pub const EXIT_OK: u8 = 0;
pub const EXIT_MISMATCH: u8 = 1;
pub const EXIT_USAGE: u8 = 2;
pub const EXIT_RESOURCE: u8 = 3;

impl CliError {
    pub fn usage(msg: impl Into<String>) -> Self {
        CliError::Usage(msg.into())
    }

    pub fn io(path: impl Into<PathBuf>, source: io::Error) -> Self {
        CliError::Io {
            path: path.into(),
            source,
        }
    }

    /// Resource caps exit with 3 and other library errors reject their
    /// parameters (2). I/O failures share code 1 with mismatches.
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Usage(_) => EXIT_USAGE,
            CliError::Mismatch(_) | CliError::Io { .. } => EXIT_MISMATCH,
            CliError::Core(e) if e.is_resource() => EXIT_RESOURCE,
            CliError::Core(_) => EXIT_USAGE,
        }
    }
}
