//! CLI error type with the stable exit-code contract:
//! 0 success, 2 non-commuting family, 3 parse/shape, 4 infeasible or invalid
//! input matrix, 5 unsupported class combination, 1 internal/numerical.

use cpinterp_core::Error as CoreError;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    NonCommuting(String),
    #[error("{0}")]
    Parse(String),
    #[error("{0}")]
    Shape(String),
    #[error("{0}")]
    Infeasible(String),
    #[error("{0}")]
    InvalidMatrix(String),
    #[error("{0}")]
    Unsupported(String),
    #[error("{0}")]
    Internal(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::NonCommuting(_) => 2,
            CliError::Parse(_) | CliError::Shape(_) => 3,
            CliError::Infeasible(_) | CliError::InvalidMatrix(_) => 4,
            CliError::Unsupported(_) => 5,
            CliError::Internal(_) => 1,
        }
    }
}

impl From<CoreError> for CliError {
    fn from(e: CoreError) -> Self {
        let msg = e.to_string();
        match e {
            CoreError::NonCommuting { .. } => CliError::NonCommuting(msg),
            CoreError::DimensionMismatch(_) => CliError::Shape(msg),
            CoreError::NonFinite => CliError::Parse(msg),
            CoreError::CriterionViolated(_) | CoreError::Marginal(_) => CliError::Infeasible(msg),
            CoreError::InvalidInput(_)
            | CoreError::NotHermitian { .. }
            | CoreError::NotUnitary { .. } => CliError::InvalidMatrix(msg),
            CoreError::Unsupported(_) => CliError::Unsupported(msg),
            CoreError::NoConvergence { .. }
            | CoreError::IllConditioned(_)
            | CoreError::MatchingFailed(_)
            | CoreError::Inconsistent(_) => CliError::Internal(msg),
        }
    }
}

pub type CliResult<T> = std::result::Result<T, CliError>;
