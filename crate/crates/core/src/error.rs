use thiserror::Error;

/// Errors raised by the model, estimator and experiment layers.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum PassError {
    /// An argument lies outside the mathematical domain of the operation.
    #[error("domain error: {0}")]
    Domain(String),

    /// A documented precondition of a formula does not hold.
    #[error("precondition violated: {0}")]
    Precondition(String),

    /// Inputs are individually valid but inconsistent with each other.
    #[error("contract violation: {0}")]
    Contract(String),

    /// An iterative method did not reach its tolerance.
    #[error("numerical failure: {0}")]
    NonConvergence(String),

    /// Invalid experiment configuration or CLI usage.
    #[error("configuration error: {0}")]
    Config(String),

    #[error("i/o error: {0}")]
    Io(String),
}

impl From<std::io::Error> for PassError {
    fn from(e: std::io::Error) -> Self {
        PassError::Io(e.to_string())
    }
}

pub type Result<T> = std::result::Result<T, PassError>;
