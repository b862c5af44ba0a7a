use thiserror::Error;

/// Errors produced by the library.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid dimensions: {0}")]
    InvalidDimensions(String),

    #[error("parameter out of range: {0}")]
    OutOfRange(String),

    #[error("enumeration cap exceeded: {count} subsets > cap {cap}; use the Monte Carlo estimator instead")]
    CapExceeded { count: u128, cap: u128 },

    #[error("kernel expects {expected} columns, got {got}")]
    WidthMismatch { expected: usize, got: usize },

    #[error("sign enumeration needs 2^{k} vectors, above the cap of 2^{cap}; use sampled sign mode")]
    SignCapExceeded { k: usize, cap: usize },

    #[error("infeasible: measurements are not in the range of the sensing matrix (residual {0:.3e})")]
    Infeasible(f64),

    #[error("solver did not converge: {0}")]
    NotConverged(String),

    #[error("numerical failure: {0}")]
    Numerical(String),

    #[error("index {index} out of range for {len} columns")]
    IndexOutOfRange { index: usize, len: usize },

    #[error("io: {0}")]
    Io(String),

    #[error("parse: {0}")]
    Parse(String),
}

pub type Result<T> = std::result::Result<T, Error>;

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

impl From<csv::Error> for Error {
    fn from(e: csv::Error) -> Self {
        Error::Io(e.to_string())
    }
}
