use thiserror::Error;

/// Errors raised by library operations.
///
/// Verdicts such as "rejected" or "inconsistent" are ordinary return values;
/// this type is reserved for calls whose preconditions do not hold.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("division by zero")]
    DivisionByZero,
    #[error("bad index: {0}")]
    BadIndex(String),
    #[error("not applicable: {0}")]
    NotApplicable(String),
    #[error("bad bound: {0}")]
    BadBound(String),
    #[error("work budget of {budget} steps exceeded")]
    BudgetExceeded { budget: u64 },
    #[error("invalid base field: {0}")]
    InvalidField(String),
    #[error("invalid extension: {0}")]
    InvalidExtension(String),
    #[error("{0}")]
    Eval(String),
}

pub type Result<T> = std::result::Result<T, Error>;
