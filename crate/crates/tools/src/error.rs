use std::path::PathBuf;

use thiserror::Error;

#[derive(Debug, Error)]
pub enum RunError {
    /// Bad flags, config documents or spectrum files.
    #[error("{0}")]
    Usage(String),
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("numerical failure: {0}")]
    Numerical(#[from] mapridge_core::Error),
    #[error("{failed} of {total} cells failed")]
    FailedCells { failed: usize, total: usize },
}

impl RunError {
    pub fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Self::Io { path: path.into(), source }
    }

    /// Process exit status: 2 usage, 3 I/O, 4 numerical.
    pub fn exit_code(&self) -> i32 {
        match self {
            Self::Usage(_) => 2,
            Self::Io { .. } => 3,
            Self::Numerical(_) | Self::FailedCells { .. } => 4,
        }
    }
}

pub type Result<T> = std::result::Result<T, RunError>;

macro_rules! usage {
    ($($arg:tt)*) => { $crate::error::RunError::Usage(format!($($arg)*)) };
}
pub(crate) use usage;
