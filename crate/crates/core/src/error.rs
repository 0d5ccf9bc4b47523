use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("covariance matrix is not symmetric (max asymmetry {0:e})")]
    NotSymmetric(f64),
    #[error("covariance matrix is not positive definite")]
    NotPositiveDefinite,
    #[error("uncertainty relation violated: smallest symplectic eigenvalue {0} < 1/2")]
    UncertaintyViolation(f64),
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },
    #[error("invalid mode pair ({0}, {1}): indices must be distinct and in 1..=4")]
    InvalidModePair(usize, usize),
    #[error("{what} must be positive, got {value}")]
    NonPositive { what: &'static str, value: f64 },
    #[error("fock cutoffs differ: {0} vs {1}")]
    CutoffMismatch(usize, usize),
    #[error("cutoff overflow: {leaked:e} of the norm leaks past the cutoff (tolerance {tolerance:e})")]
    CutoffOverflow { leaked: f64, tolerance: f64 },
    #[error("cutoff {cutoff} too small for r = {r}: predicted tail {tail:e} exceeds {tolerance:e}")]
    TruncationTooCoarse {
        r: f64,
        cutoff: usize,
        tail: f64,
        tolerance: f64,
    },
    #[error("loss parameter must lie in [0, 1], got {0}")]
    LossOutOfRange(f64),
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Csv(#[from] csv::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
