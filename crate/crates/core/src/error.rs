use num_bigint::BigInt;
use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("invalid triplet ({p},{q},{r}): {reason}")]
    InvalidTriplet { p: u64, q: u64, r: u64, reason: String },

    #[error("intersection matrix is singular")]
    Singular,

    #[error("plumbing graph is not negative definite")]
    NotNegativeDefinite,

    #[error("plumbing graph is not unimodular (det = {0})")]
    NotUnimodular(BigInt),

    #[error("plumbing graph has {0} bad vertices, at most one is supported")]
    TooManyBadVertices(usize),

    #[error("class is not characteristic at vertex {0}")]
    NotCharacteristic(usize),

    #[error("oracle infeasible: {states} initial classes exceed the budget of {budget}")]
    BudgetExceeded { states: BigInt, budget: u64 },

    #[error("full path did not terminate within {0} steps")]
    StepBudgetExceeded(u64),

    #[error("value out of machine range: {0}")]
    Overflow(String),

    #[error("verification mismatch: {0}")]
    Mismatch(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}

impl Error {
    pub(crate) fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidInput(msg.into())
    }
}
