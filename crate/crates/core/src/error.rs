use std::fmt;

use crate::solve::Solution;

/// Result alias used throughout the crate.
pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("dimension mismatch: {0}")]
    DimMismatch(String),

    #[error("invalid dimensions {0}")]
    InvalidDims(DimsDisplay),

    #[error("non-finite value at storage index {0}")]
    NonFinite(usize),

    #[error("expected {expected} values, got {got}")]
    LengthMismatch { expected: usize, got: usize },

    #[error("conjugate symmetry violated: imaginary residue {residue:e} exceeds {limit:e}")]
    SymmetryViolation { residue: f64, limit: f64 },

    #[error("index {index} out of range (bound {bound})")]
    IndexOutOfRange { index: usize, bound: usize },

    #[error("threshold must be non-negative, got {0}")]
    NegativeThreshold(f64),

    #[error("relative tolerance must lie in [0, 1), got {0}")]
    InvalidTolerance(f64),

    #[error("measurement count must be at least 1")]
    ZeroMeasurements,

    #[error("sampling rate must lie in (0, 1], got {0}")]
    InvalidRate(f64),

    #[error("rank {rank} outside [1, {max}]")]
    InvalidRank { rank: usize, max: usize },

    #[error("epsilon must lie in (0, 1), got {0}")]
    InvalidEpsilon(f64),

    #[error("problem too large: {0}")]
    TooLarge(String),

    #[error("invalid solver configuration: {0}")]
    InvalidConfig(String),

    #[error("solver stopped after {} iterations without meeting the tolerance", .0.report.iterations)]
    NotConverged(Box<Solution>),

    #[error("numerical failure: {0}")]
    Numerical(String),

    #[error("malformed input: {0}")]
    Format(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

/// Dimension triple carried by [`Error::InvalidDims`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct DimsDisplay(pub usize, pub usize, pub usize);

impl fmt::Display for DimsDisplay {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}x{}x{}", self.0, self.1, self.2)
    }
}

impl Error {
    pub(crate) fn dims(a: impl fmt::Display, b: impl fmt::Display) -> Self {
        Error::DimMismatch(format!("{a} vs {b}"))
    }
}
