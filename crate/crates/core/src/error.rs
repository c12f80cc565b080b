use thiserror::Error;

/// Errors raised by polynomial arithmetic, point construction, discrepancy
/// evaluation and generator search.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("{0} is not a prime modulus")]
    NotPrime(u64),
    #[error("zero divisor")]
    ZeroDivisor,
    #[error("polynomials over different fields (p={0} and p={1})")]
    FieldMismatch(u32, u32),
    #[error("expected a nonconstant polynomial")]
    ConstantPolynomial,
    #[error("parse error at position {pos}: {msg}")]
    Parse { pos: usize, msg: String },
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    #[error("invalid configuration: {0}")]
    Config(String),
    #[error("modulus {0} is not irreducible")]
    Reducible(String),
    #[error("modulus shares factor with pX: {0}")]
    NotCoprime(String),
    #[error("index {index} out of range (limit {limit})")]
    IndexOutOfRange { index: u64, limit: u64 },
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("budget exceeded: {what} needs {needed}, budget is {budget}; {hint}")]
    BudgetExceeded {
        what: &'static str,
        needed: u128,
        budget: u128,
        hint: &'static str,
    },
    #[error("arithmetic overflow in {0}")]
    Overflow(&'static str),
}

/// Coarse classification used by front ends to pick exit codes.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ErrorKind {
    /// Malformed input or arguments.
    Usage,
    /// A mathematical precondition failed (reducible modulus, shared factors, ...).
    Precondition,
    /// A computation budget would be exceeded.
    Budget,
}

impl Error {
    pub fn kind(&self) -> ErrorKind {
        match self {
            Error::Parse { .. }
            | Error::InvalidArgument(_)
            | Error::DimensionMismatch { .. }
            | Error::IndexOutOfRange { .. } => ErrorKind::Usage,
            Error::BudgetExceeded { .. } => ErrorKind::Budget,
            _ => ErrorKind::Precondition,
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
