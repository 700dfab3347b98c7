use thiserror::Error;

/// Failures raised by the floating-point and exact evaluators.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    /// A machine-word quantity (binomial row, factorial) would not fit.
    #[error("overflow: {0}")]
    Overflow(String),
    /// The argument lies outside the domain of the requested form.
    #[error("domain error: {0}")]
    Domain(String),
    /// A precondition on an integer parameter was violated.
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
}

pub type Result<T> = std::result::Result<T, Error>;
