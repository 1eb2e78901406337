use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("invalid frequency: {0}")]
    InvalidFrequency(String),

    #[error("unknown frequency family `{0}`")]
    UnknownFamily(String),

    #[error("index {index} outside the covered prefix 1..={len}")]
    IndexOutOfRange { index: usize, len: usize },

    #[error("polynomials are bound to different frequencies")]
    FrequencyMismatch,

    #[error("character lattice does not match: {0}")]
    LatticeMismatch(String),

    #[error("combinatorial budget exceeded: {needed} > {budget}")]
    BudgetExceeded { needed: u128, budget: u128 },

    #[error("Bohr matrix rows are not integral: {0}")]
    NonIntegerRows(String),

    #[error("torus dimension {dims} exceeds limit {limit}")]
    DimensionTooLarge { dims: usize, limit: usize },

    #[error("parse error: {0}")]
    Parse(String),

    #[error("internal invariant violated: {0}")]
    Invariant(String),
}

pub type Result<T> = std::result::Result<T, Error>;
