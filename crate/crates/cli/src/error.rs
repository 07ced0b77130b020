use std::path::PathBuf;

use confboost_core::analysis::AnalysisError;
use confboost_core::binning::BinningError;
use confboost_core::miner::MinerError;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    /// Bad flags, config or input data (exit 2).
    #[error("{0}")]
    Input(String),
    #[error("{path}: {message}")]
    File { path: PathBuf, message: String },
    #[error("missing artifact {}; run `confboost {stage}` first", path.display())]
    MissingArtifact { path: PathBuf, stage: &'static str },
    #[error("stale artifact {}: {reason}; rerun `confboost {stage}`", path.display())]
    StaleArtifact { path: PathBuf, reason: String, stage: &'static str },
    /// A broken invariant inside the pipeline (exit 3).
    #[error("internal error: {0}")]
    Internal(String),
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Internal(_) => 3,
            _ => 2,
        }
    }

    pub fn file(path: impl Into<PathBuf>, message: impl ToString) -> Self {
        CliError::File { path: path.into(), message: message.to_string() }
    }
}

impl From<BinningError> for CliError {
    fn from(e: BinningError) -> Self {
        match e {
            BinningError::Store(s) => CliError::Internal(s.to_string()),
            other => CliError::Input(other.to_string()),
        }
    }
}

impl From<MinerError> for CliError {
    fn from(e: MinerError) -> Self {
        match e {
            MinerError::InvalidConfig(_) | MinerError::EmptyStore => CliError::Input(e.to_string()),
            other => CliError::Internal(other.to_string()),
        }
    }
}

impl From<AnalysisError> for CliError {
    fn from(e: AnalysisError) -> Self {
        match e {
            AnalysisError::InvalidConfig(_) => CliError::Input(e.to_string()),
            other => CliError::Internal(other.to_string()),
        }
    }
}

pub type Result<T> = std::result::Result<T, CliError>;
