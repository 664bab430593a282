use thiserror::Error;

/// Errors raised by field construction, arithmetic and the search routines.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid field data: {0}")]
    InvalidFieldSpec(String),
    #[error("{0} is not squarefree")]
    NotSquarefree(i64),
    #[error("Q(sqrt {0}) is not in the class-number-one whitelist")]
    NotClassNumberOne(i64),
    #[error("continued fraction did not close within {0} steps")]
    PrecisionExhausted(usize),
    #[error("no principal generator found inside the search box (bad field data or class number > 1)")]
    GeneratorNotFound,
    #[error("enumeration budget exceeded: {needed} candidates, cap {cap}")]
    BudgetExceeded { needed: f64, cap: u64 },
    #[error("matrix is not positive definite")]
    NonPositiveDefinite,
    #[error("unsupported field: {0}")]
    UnsupportedField(String),
    #[error("invalid input: {0}")]
    InvalidInput(String),
    #[error("invariant violated: {0}")]
    ViolationFound(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
