//! Error type shared by all modules.

use thiserror::Error;

/// Errors produced by the library.
#[derive(Debug, Clone, Error)]
pub enum Error {
    /// Shapes of the inputs do not line up.
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    /// A matrix failed the Hermiticity check at construction.
    #[error("matrix is not Hermitian: asymmetry {asymmetry:.3e} exceeds tolerance {tol:.3e}")]
    NotHermitian { asymmetry: f64, tol: f64 },

    /// A matrix expected to be unitary is not, within tolerance.
    #[error("matrix is not unitary: residual {residual:.3e} exceeds tolerance {tol:.3e}")]
    NotUnitary { residual: f64, tol: f64 },

    /// Two family members do not commute.
    #[error("family {family}: members {i} and {j} do not commute (commutator norm {norm:.3e})")]
    NonCommuting {
        family: &'static str,
        i: usize,
        j: usize,
        norm: f64,
    },

    /// An iterative kernel ran out of iterations.
    #[error("{op} did not converge after {iterations} iterations (residual {residual:.3e})")]
    NoConvergence {
        op: &'static str,
        iterations: usize,
        residual: f64,
    },

    /// A constructive operation was called with its criterion violated.
    #[error("criterion violated: {0}")]
    CriterionViolated(String),

    /// Input contains NaN or infinite entries.
    #[error("input contains a non-finite entry")]
    NonFinite,

    /// The LP could not be resolved either way at working precision.
    #[error("linear program is numerically ill-conditioned: {0}")]
    IllConditioned(String),

    /// Phase-1 landed in the band between tolerance and the infeasibility
    /// threshold; rescaling the input usually resolves it.
    #[error("feasibility is marginal at working precision: {0}")]
    Marginal(String),

    /// Birkhoff peeling found no perfect matching on the positive support.
    #[error("no perfect matching on positive support: {0}")]
    MatchingFailed(String),

    /// Two routes that must agree did not; this is a bug trap, not a user error.
    #[error("internal consistency check failed: {0}")]
    Inconsistent(String),

    /// Catch-all for invalid inputs with no better classification.
    #[error("invalid input: {0}")]
    InvalidInput(String),

    /// The requested class/operation combination is not defined.
    #[error("unsupported request: {0}")]
    Unsupported(String),
}

pub type Result<T> = std::result::Result<T, Error>;
