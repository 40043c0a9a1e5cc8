use std::path::Path;

use qnute::QnuteError;
use thiserror::Error;

use crate::config::ConfigError;

#[derive(Debug, Error)]
pub enum AppError {
    #[error("config error: {0}")]
    Config(#[from] ConfigError),
    #[error("config error: {0}")]
    Usage(String),
    #[error(transparent)]
    Core(#[from] QnuteError),
    #[error("{path}: {source}")]
    Io { path: String, source: std::io::Error },
    #[error("{path}: {source}")]
    Csv { path: String, source: csv::Error },
}

impl AppError {
    pub fn io(path: &Path, source: std::io::Error) -> Self {
        AppError::Io { path: path.display().to_string(), source }
    }

    pub fn csv(path: &Path, source: csv::Error) -> Self {
        AppError::Csv { path: path.display().to_string(), source }
    }

    /// 2 for bad input, 3 for a numerical breakdown, 1 for I/O trouble.
    pub fn exit_code(&self) -> u8 {
        match self {
            AppError::Config(_) | AppError::Usage(_) => 2,
            AppError::Core(e) if e.is_numerical() => 3,
            AppError::Core(_) => 2,
            AppError::Io { .. } | AppError::Csv { .. } => 1,
        }
    }
}
