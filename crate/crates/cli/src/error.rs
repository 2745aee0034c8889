use std::path::PathBuf;

use lossorder::LossError;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),

    #[error("{}: {source}", path.display())]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error(transparent)]
    Loss(#[from] LossError),

    #[error("failed to write output: {0}")]
    Output(#[from] std::io::Error),

    #[error("failing checks: {}", .0.join(", "))]
    ChecksFailed(Vec<String>),
}

impl CliError {
    /// 10 for bad input, 11 when the moment prefix cannot decide, 12 for
    /// other numerical failures. A failed reproduction run exits 1.
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) | CliError::Io { .. } => 10,
            CliError::ChecksFailed(_) => 1,
            CliError::Output(_) => 12,
            CliError::Loss(e) => match e {
                LossError::Undecided { .. } => 11,
                LossError::NoDensity
                | LossError::MomentsUndefined(_)
                | LossError::NonPositiveMoment { .. }
                | LossError::ThresholdNotFound(_)
                | LossError::Quadrature(_) => 12,
                _ => 10,
            },
        }
    }
}

pub fn read(path: &str) -> Result<String, CliError> {
    std::fs::read_to_string(path).map_err(|source| CliError::Io { path: path.into(), source })
}
