use thiserror::Error;

use crate::rotations::Family;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum NojdError {
    #[error("dimension mismatch: expected {expected}, got {actual}")]
    DimensionMismatch { expected: usize, actual: usize },
    #[error("matrix set is empty")]
    EmptySet,
    #[error("matrix dimension must be at least {min}, got {actual}")]
    DimensionTooSmall { min: usize, actual: usize },
    #[error("matrix is not Hermitian (relative skew part {residual:.3e})")]
    NotHermitian { residual: f64 },
    #[error("matrix violates the real block structure (relative residual {residual:.3e})")]
    BlockStructure { residual: f64 },
    #[error("matrix is numerically singular")]
    Singular,
    #[error("row or column {index} of the global matrix is zero")]
    ZeroLine { index: usize },
    #[error("diagonal vector {index} is zero")]
    ZeroVector { index: usize },
    #[error("non-finite value in sweep {sweep}, pair ({i}, {j}){}", family_suffix(.family))]
    NonFinite {
        sweep: usize,
        i: usize,
        j: usize,
        family: Option<Family>,
    },
    #[error("invalid configuration: {0}")]
    InvalidConfig(String),
    #[error("scenario bound `{bound}` not attainable after {attempts} attempts")]
    Unattainable { bound: &'static str, attempts: usize },
    #[error("parse error at line {line}: {msg}")]
    Parse { line: usize, msg: String },
    #[error("i/o error: {0}")]
    Io(String),
}

fn family_suffix(family: &Option<Family>) -> String {
    match family {
        Some(f) => format!(", {f:?}"),
        None => String::new(),
    }
}

impl From<std::io::Error> for NojdError {
    fn from(e: std::io::Error) -> Self {
        NojdError::Io(e.to_string())
    }
}

impl From<csv::Error> for NojdError {
    fn from(e: csv::Error) -> Self {
        NojdError::Io(e.to_string())
    }
}

pub type Result<T> = std::result::Result<T, NojdError>;
