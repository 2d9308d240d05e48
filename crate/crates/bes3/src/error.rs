use thiserror::Error;

/// Library-wide error type.
#[derive(Debug, Error)]
pub enum Error {
    /// A simulation or scenario configuration is invalid (names the offending field).
    #[error("invalid configuration: {0}")]
    Config(String),

    /// A closed-form evaluation was requested outside its domain.
    #[error("domain error: {0}")]
    Domain(String),

    /// Quadrature failed to converge; carries the achieved error estimate.
    #[error("numerical error: {message} (achieved error estimate {error_estimate:e})")]
    Numerical { message: String, error_estimate: f64 },

    /// A statistics routine was called with unusable input.
    #[error("usage error: {0}")]
    Usage(String),
}

pub type Result<T> = std::result::Result<T, Error>;
