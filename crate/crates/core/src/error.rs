use thiserror::Error;

/// Errors raised by the certification and index routines.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("function is not proper on the grid: {0}")]
    ImproperFunction(String),
    #[error("derivative oracles are missing")]
    MissingDerivatives,
    #[error("index {position} is infinite ({value}); the criterion requires non-constant coordinates")]
    InfiniteIndex { position: usize, value: String },
    #[error("index {position} is negative ({value}); the harmonic formula requires convex coordinates")]
    NegativeIndex { position: usize, value: String },
    #[error("grid scan needs {needed} pairs, budget is {budget}")]
    BudgetExceeded { needed: u128, budget: u128 },
    #[error("invalid domain: {0}")]
    InvalidDomain(String),
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    #[error("inverse loss does not invert the loss at {at}: got {got}")]
    InverseMismatch { at: f64, got: f64 },
    #[error("measure '{measure}' output is not measurable on atom {atom}")]
    NotMeasurable { measure: String, atom: usize },
    #[error("measure '{measure}' is not finite at outcome {outcome}")]
    NonFinite { measure: String, outcome: usize },
    #[error("invalid probability space: {0}")]
    InvalidSpace(String),
    #[error("invalid partition: {0}")]
    InvalidPartition(String),
    #[error("vector {index} is linearly dependent on its predecessors")]
    RankDeficient { index: usize },
    #[error("assumption violated: {0}")]
    AssumptionViolated(String),
    #[error("parse error at line {line}: {message}")]
    Parse { line: usize, message: String },
}

pub type Result<T> = std::result::Result<T, Error>;
