use thiserror::Error;

/// Errors produced by the certification calculus.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    /// An argument outside the mathematical domain of a function.
    #[error("{function}: argument out of domain ({detail})")]
    Domain {
        function: &'static str,
        detail: String,
    },

    /// A prior, quadrature, or request parameter outside its allowed range.
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    /// A numerical procedure that failed to reach its tolerance.
    #[error("{operation} did not converge (estimate {value:e}, error estimate {err_estimate:e})")]
    NonConvergence {
        operation: &'static str,
        value: f64,
        err_estimate: f64,
    },

    /// The operation is not defined for the given prior variant.
    #[error("unsupported: {0}")]
    Unsupported(String),

    /// A scenario file, flag, or axis specification could not be interpreted.
    #[error("config: {0}")]
    Config(String),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn invalid(msg: impl Into<String>) -> Error {
    Error::InvalidParameter(msg.into())
}

pub(crate) fn config(msg: impl Into<String>) -> Error {
    Error::Config(msg.into())
}
