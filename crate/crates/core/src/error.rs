use thiserror::Error;

/// Crate-wide error type.
#[derive(Debug, Error)]
pub enum Error {
    /// Malformed input data (wrong dimensions, non-finite entries, ...).
    #[error("invalid input: {0}")]
    InvalidInput(String),
    /// The anchor point does not strictly satisfy the inequality constraint,
    /// or violates an attached equality system.
    #[error("invalid anchor: {0}")]
    InvalidAnchor(String),
    /// A linear equality system has no solution.
    #[error("infeasible equality system: {0}")]
    InfeasibleEquality(String),
    /// Inconsistent or incomplete solver/sweep configuration.
    #[error("configuration error: {0}")]
    Configuration(String),
    /// An operation was called outside its stated precondition.
    #[error("contract violation: {0}")]
    ContractViolation(String),
    /// A computation produced non-finite values or failed to converge.
    #[error("numerical error: {0}")]
    Numerical(String),
    /// A problem generator exhausted its resampling budget.
    #[error("generation failure: {0}")]
    GenerationFailure(String),
    /// Independent reference-value estimates disagree beyond tolerance.
    #[error("oracle unreliable: {0}")]
    OracleUnreliable(String),
    /// The instance cannot be normalized (objective gap at the anchor is zero).
    #[error("degenerate instance: {0}")]
    DegenerateInstance(String),
    /// Malformed archive or configuration file.
    #[error("parse error: {0}")]
    Parse(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
