use thiserror::Error;

/// Errors raised by the library.
///
/// Every variant is either a validation problem (bad input, violated
/// precondition) or a numerical failure. [`Error::is_numerical`] separates the
/// two so front ends can map them to distinct exit statuses.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("non-finite value in {what} at index {index}")]
    NonFinite { what: &'static str, index: usize },

    #[error("parity mismatch: l = {l} and n = {n} must have the same parity")]
    ParityMismatch { l: i64, n: i64 },

    #[error("({l},{n}) has no discrete spectrum")]
    NoDiscreteSpectrum { l: i64, n: i64 },

    #[error("m = {m} is not a discrete parameter for ({l},{n})")]
    NotDiscreteParameter { l: i64, n: i64, m: i64 },

    #[error("eta uncalibrated for (l,n,m) = ({l},{n},{m})")]
    Uncalibrated { l: i64, n: i64, m: i64 },

    #[error("eta calibration failed for (l,n,m) = ({l},{n},{m}): {reason}")]
    CalibrationFailure { l: i64, n: i64, m: i64, reason: String },

    #[error("symbol undefined at the discrete point m = {m} (argument {argument}): {reason}")]
    SymbolUndefined { m: i64, argument: f64, reason: String },

    #[error("weak-type norm is infinite")]
    InfiniteWeakNorm,

    #[error("t = {t} lies outside the profile grid [{lo}, {hi}]")]
    OutOfRange { t: f64, lo: f64, hi: f64 },

    #[error("quadrature did not converge: {0}")]
    Quadrature(String),

    #[error("iteration did not converge after {iterations} steps (last increment {increment:e})")]
    NotConverged { iterations: usize, increment: f64 },
}

impl Error {
    /// True for failures of a numerical method, false for rejected input.
    pub fn is_numerical(&self) -> bool {
        matches!(
            self,
            Error::Quadrature(_) | Error::NotConverged { .. } | Error::CalibrationFailure { .. }
        )
    }

    pub(crate) fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidInput(msg.into())
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
