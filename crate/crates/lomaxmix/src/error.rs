use std::io;
use std::path::PathBuf;

use thiserror::Error;

/// Failure of a command, carrying its exit status.
#[derive(Debug, Error)]
pub enum CliError {
    /// Bad input file, flag value or model specification (exit 2).
    #[error("{0}")]
    Input(String),
    /// The inputs were readable but produced nothing usable (exit 1).
    #[error("{0}")]
    Empty(String),
    #[error("{}: {source}", path.display())]
    Io { path: PathBuf, source: io::Error },
    #[error(transparent)]
    Core(#[from] lomaxmix_core::Error),
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        use lomaxmix_core::Error as E;
        match self {
            CliError::Input(_) | CliError::Io { .. } => 2,
            CliError::Empty(_) => 1,
            CliError::Core(E::Domain(_) | E::InvalidParameter(_)) => 2,
            CliError::Core(_) => 1,
        }
    }

    pub(crate) fn io(path: impl Into<PathBuf>) -> impl FnOnce(io::Error) -> Self {
        let path = path.into();
        move |source| CliError::Io { path, source }
    }
}
