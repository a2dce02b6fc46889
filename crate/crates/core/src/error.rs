use thiserror::Error;

/// Errors raised by the library.
#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    #[error("arity {0} outside supported range 1..={max}", max = crate::boolfn::MAX_ARITY)]
    InvalidArity(usize),

    #[error("arity mismatch: {left} vs {right}")]
    ArityMismatch { left: usize, right: usize },

    #[error("subset mask {mask:#x} contains a coordinate above n = {n}")]
    InvalidSubset { mask: u64, n: usize },

    #[error("reconstructed value {value}/2^{n} at point {point} is not in {{-1, +1}}")]
    NotBoolean { point: u64, value: i64, n: usize },

    #[error("spectrum is identically zero")]
    ZeroSpectrum,

    #[error("brute-force oracle refused at n = {0} (limit is 4)")]
    OracleTooLarge(usize),

    #[error("degree threshold {d} exceeds arity {n}")]
    InvalidThreshold { d: usize, n: usize },

    #[error("epsilon {0} outside (0, 1/2]")]
    EpsilonOutOfRange(String),

    #[error("no non-negative l satisfies the strict bound for epsilon {0}")]
    NoValidL(String),

    #[error("invalid character family: {0}")]
    InvalidFamily(String),

    #[error("precondition violated: {0}")]
    RejectedInput(String),

    #[error("no unique strictly-largest block: {0}")]
    AmbiguousHeavyBlock(String),

    #[error("invalid parameters: {0}")]
    InvalidParameters(String),

    #[error("promise violated: {0}")]
    PromiseViolation(String),

    #[error("padding length m = {m} below 2k = {}", 2 * k)]
    PaddingFormulaInvalid { m: usize, k: usize },

    #[error("padding length m = {m} below 3k = {}: pads may collide", 3 * k)]
    UnsafePadding { m: usize, k: usize },

    #[error("query budget of {budget} exceeded")]
    BudgetExceeded { budget: usize },

    #[error("parse error in {field}: {message}")]
    Parse { field: String, message: String },
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    pub(crate) fn parse(field: impl Into<String>, message: impl ToString) -> Self {
        Error::Parse {
            field: field.into(),
            message: message.to_string(),
        }
    }
}
