//! Error type shared across the library.

use thiserror::Error;

/// Errors produced by the numerical layers.
///
/// The CLI maps these to exit codes: invalid input → 1, failed
/// convergence or an internal consistency breach → 2.
#[derive(Error, Debug, Clone)]
pub enum Error {
    /// Input outside the admissible parameter range.
    #[error("domain error: {0}")]
    Domain(String),

    /// Requested numerical support does not exist (e.g. sphere grids
    /// are only built for d in {2, 3}).
    #[error("unsupported: {0}")]
    Unsupported(String),

    /// A quadrature or iteration failed to reach the requested
    /// tolerance; `best` carries the last estimate and `achieved` the
    /// error bound it came with.
    #[error("failed to converge: {message} (best estimate {best:e}, achieved error {achieved:e})")]
    Convergence {
        message: String,
        best: f64,
        achieved: f64,
    },

    /// Two routes that must agree to high accuracy did not; this
    /// signals a formula bug rather than bad input.
    #[error("internal consistency failure: {0}")]
    Computation(String),
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    /// Exit code the CLI uses for this error class.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Domain(_) | Error::Unsupported(_) => 1,
            Error::Convergence { .. } | Error::Computation(_) => 2,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exit_codes_per_error_class() {
        assert_eq!(Error::Domain("x".into()).exit_code(), 1);
        assert_eq!(Error::Unsupported("x".into()).exit_code(), 1);
        assert_eq!(
            Error::Convergence { message: "x".into(), best: 0.0, achieved: 1.0 }.exit_code(),
            2
        );
        assert_eq!(Error::Computation("x".into()).exit_code(), 2);
    }
}
