use thiserror::Error;

/// Errors produced by the analysis library.
#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch: {0}")]
    Dimension(String),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("network fails validation: {0}")]
    Validation(String),

    #[error("network is unstable (nu_i >= mu_i for some queue)")]
    Unstable,

    #[error("linear system is singular: {0}")]
    Singular(String),

    #[error("linear program failed: {0}")]
    LpFailure(String),

    #[error("exponent {0} exceeds overflow guard (700)")]
    ExpOverflow(f64),

    #[error("precondition violated: {0}")]
    Precondition(String),

    #[error("routing matrix does not match the requested special-case pattern: {0}")]
    PatternMismatch(String),
}

pub type Result<T> = std::result::Result<T, Error>;
