use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("{0} is not a prime")]
    NotPrime(u64),

    #[error("field of order {p}^{n} exceeds the supported size")]
    FieldTooLarge { p: u64, n: u32 },

    #[error("no irreducible polynomial of degree {n} over F_{p}")]
    NoIrreducible { p: u64, n: u32 },

    #[error("zero has no multiplicative inverse")]
    ZeroInverse,

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("function has a pole at the evaluation point")]
    PoleAtPoint,

    #[error("evaluation at the point at infinity is not supported")]
    EvaluationAtInfinity,

    #[error("unsupported function shape: {0}")]
    UnsupportedShape(String),

    #[error("infeasible parameters: {0}")]
    Infeasible(String),

    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    #[error("inconsistent linear system")]
    InconsistentSystem,

    #[error("solution prefix is not uniquely determined")]
    PrefixNotUnique,

    #[error("insufficient rank: need {needed}, have {available}")]
    InsufficientRank { needed: usize, available: usize },

    #[error("search budget exceeded: {0}")]
    BudgetExceeded(String),

    #[error("decode failure: {0}")]
    DecodeFailure(String),

    #[error("internal error: {0}")]
    Internal(String),

    #[error("malformed frame: {0}")]
    Wire(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}
