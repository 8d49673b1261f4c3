use thiserror::Error;

/// Errors raised by covariance-matrix operations.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    /// Shapes or partitions that do not fit together.
    #[error("structural error: {0}")]
    Structural(String),

    /// Input outside the mathematical domain of an operation.
    #[error("domain error: {0}")]
    Domain(String),

    #[error("ill-conditioned {what}: condition number {condition:.3e} exceeds {limit:.1e}")]
    IllConditioned {
        what: &'static str,
        condition: f64,
        limit: f64,
    },

    /// The local-symplectic invariants admit no real standard form.
    #[error("inconsistent invariants: {0}")]
    InconsistentInvariants(String),

    #[error("precondition violated: {0}")]
    Precondition(String),

    #[error("degenerate data: {0}")]
    DegenerateData(String),

    #[error("parse error: {0}")]
    Parse(String),
}

pub type Result<T> = std::result::Result<T, Error>;
