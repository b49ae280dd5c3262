use thiserror::Error;

/// Broad classification of failures, used by front ends to pick exit or status codes.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ErrorKind {
    /// The caller supplied input that violates an operation's precondition.
    Precondition,
    /// A numerical routine failed or produced a result outside its guarantees.
    Numerical,
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid shape: {0}")]
    Shape(String),
    #[error("non-finite entry at ({row}, {col})")]
    NonFinite { row: usize, col: usize },
    #[error("matrix is not square ({rows}x{cols})")]
    NotSquare { rows: usize, cols: usize },
    #[error("matrix is not Hermitian (asymmetry {asymmetry:.3e} exceeds {tolerance:.3e})")]
    NotHermitian { asymmetry: f64, tolerance: f64 },
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },
    #[error("invalid exponent: {0}")]
    InvalidExponent(String),
    #[error("divided difference needs derivative order {required}, symbol provides {available}")]
    OrderInsufficient { required: usize, available: usize },
    #[error("precondition violated: {0}")]
    Precondition(String),
    #[error("eigensolver did not converge")]
    NoConvergence,
    #[error("trace has imaginary residue {residue:.3e}")]
    ImaginaryTrace { residue: f64 },
    #[error("arithmetic failure: {0}")]
    Arithmetic(String),
}

impl Error {
    pub fn kind(&self) -> ErrorKind {
        match self {
            Error::NoConvergence | Error::ImaginaryTrace { .. } | Error::Arithmetic(_) => {
                ErrorKind::Numerical
            }
            _ => ErrorKind::Precondition,
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
