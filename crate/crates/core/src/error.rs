use thiserror::Error;

/// Errors raised by the numerical kernels, samplers and estimators.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("{what}: argument {value} outside the domain ({expected})")]
    Domain {
        what: &'static str,
        value: f64,
        expected: &'static str,
    },

    #[error("{what}: pole at {value}")]
    Pole { what: &'static str, value: f64 },

    #[error("{what} did not converge (last error estimate {estimate:e})")]
    NonConvergence { what: &'static str, estimate: f64 },

    #[error("{what} is infinite for these parameters")]
    InfiniteMoment { what: &'static str },

    #[error("tempered jump sampler: {rejections} consecutive rejections (theta = {theta})")]
    RejectionExhausted { rejections: u64, theta: f64 },

    #[error("covariance factorization failed: {0}")]
    Factorization(String),

    #[error("outside the long-range-dependence regime: {0}")]
    Regime(String),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("need at least {need} samples, got {got}")]
    Degenerate { got: usize, need: usize },
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn domain(what: &'static str, value: f64, expected: &'static str) -> Error {
    Error::Domain {
        what,
        value,
        expected,
    }
}
