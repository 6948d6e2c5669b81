use alloc::string::String;

pub type Result<T, E = Error> = core::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),
    #[error("invalid input: {0}")]
    InvalidInput(String),
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("estimation failed: {0}")]
    Estimation(String),
    #[error("degenerate outcome: {0}")]
    DegenerateOutcome(String),
    #[error("constraint form mismatch: {0}")]
    FormMismatch(String),
    /// A program that is bounded by construction came back unbounded.
    #[error("internal error: {0}")]
    Internal(String),
    #[error("simplex stopped after {0} pivots without converging")]
    IterationLimit(usize),
}
