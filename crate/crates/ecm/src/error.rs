use std::path::PathBuf;

use thiserror::Error;

/// Everything the tools can fail with, mapped onto process exit codes.
#[derive(Debug, Error)]
pub enum ToolError {
    #[error("{}: {source}", path.display())]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("{}:{line}: {message}", path.display())]
    Parse { path: PathBuf, line: u64, message: String },

    #[error("configuration: {0}")]
    Config(String),

    #[error(transparent)]
    Core(#[from] ecm_core::Error),

    #[error(transparent)]
    Fit(#[from] ecm_core::FitError),

    #[error("{failed} of {total} panel cells failed")]
    CellsFailed { failed: usize, total: usize },
}

impl ToolError {
    pub fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Self::Io { path: path.into(), source }
    }

    /// 3 for convergence problems, 2 for everything caused by the input.
    pub fn exit_code(&self) -> u8 {
        match self {
            Self::Fit(_) | Self::CellsFailed { .. } | Self::Core(ecm_core::Error::NestingViolated { .. }) => 3,
            _ => 2,
        }
    }
}

pub type Result<T, E = ToolError> = std::result::Result<T, E>;
