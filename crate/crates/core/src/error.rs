use thiserror::Error;

/// Errors raised by the numeration, geometry and measurement routines.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("m must be at least 2, got {0}")]
    InvalidOrder(usize),

    #[error("basis term F_{index} overflows the exact integer range")]
    Overflow { index: usize },

    #[error("n = {n} exceeds basis coverage (largest supported value is {max})")]
    OutOfRange { n: u64, max: u64 },

    #[error("digit string contains a run of {m} consecutive ones")]
    Inadmissible { m: usize },

    #[error("digit {digit} at position {position} is not binary")]
    NonBinaryDigit { position: usize, digit: u8 },

    #[error(
        "root refinement did not converge (residual {residual:e} above tolerance {tolerance:e})"
    )]
    NonConvergence { residual: f64, tolerance: f64 },

    #[error("input point set is empty")]
    EmptyInput,

    #[error("point {index} has coordinate {value} outside [0, 1)")]
    PointOutOfRange { index: usize, value: f64 },

    #[error(
        "exact enumeration needs ~{needed:e} operations, budget is {budget:e}; use a smaller N"
    )]
    BudgetExceeded { needed: f64, budget: f64 },

    #[error("degenerate samples: {0}")]
    Degenerate(String),

    #[error("cloud too sparse: {0}")]
    InsufficientDensity(String),

    #[error("level k = {k} above enumeration cap {cap}")]
    LevelAboveCap { k: usize, cap: usize },

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("parse error: {0}")]
    Parse(String),

    #[error("i/o error: {0}")]
    Io(String),
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

impl From<csv::Error> for Error {
    fn from(e: csv::Error) -> Self {
        Error::Parse(e.to_string())
    }
}

pub type Result<T> = std::result::Result<T, Error>;
