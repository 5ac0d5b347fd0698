use thiserror::Error;

use crate::field::FieldSpec;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("field mismatch: {left} vs {right}")]
    FieldMismatch { left: FieldSpec, right: FieldSpec },

    #[error("term budget exceeded: {reached} terms (limit {limit})")]
    BudgetExceeded { limit: usize, reached: usize },

    #[error("exponent overflow")]
    ExponentOverflow,

    #[error("{0} is not a supported prime modulus")]
    InvalidModulus(u64),

    #[error("{0} is not invertible")]
    NotInvertible(String),

    #[error("not triangular: {0}")]
    NotTriangular(String),

    #[error("not affine: {0}")]
    NotAffine(String),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("precondition violated: {0}")]
    Precondition(String),

    #[error("stratum mismatch: expected {expected}, got {got}")]
    StratumMismatch { expected: String, got: String },

    #[error("hop {hop} failed: {reason}")]
    HopFailure { hop: usize, reason: String },

    #[error("pointwise disagreement: {0}")]
    Disagreement(String),

    #[error("parse error at {line}:{column}: {message}")]
    Parse { line: usize, column: usize, message: String },
}

impl Error {
    /// True for the blow-up guard, which callers report separately from failures.
    pub fn is_budget(&self) -> bool {
        matches!(self, Error::BudgetExceeded { .. })
    }
}
