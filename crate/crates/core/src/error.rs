use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    #[error("polynomial division leaves a remainder")]
    NotDivisible,
    #[error("division by the zero polynomial")]
    ZeroDivisor,
    #[error("polynomial is not squarefree")]
    NotSquarefree,
    #[error("polynomials over different prime fields")]
    ModulusMismatch,
    #[error("invalid discriminant {0}")]
    InvalidDiscriminant(i64),
    #[error("discriminant {0} is outside the supported range")]
    OutOfRange(i64),
    #[error("no modular polynomial data for level {0}")]
    LevelUnavailable(u64),
    #[error("malformed modular polynomial file: {0}")]
    FormatError(String),
    #[error("modular polynomial check failed: {0}")]
    InvariantViolation(String),
    #[error("characteristic {0} is not supported")]
    BadCharacteristic(u64),
    #[error("group order could not be determined")]
    AmbiguousOrder,
    #[error("precision exhausted after {0} retries")]
    PrecisionExhausted(u32),
    #[error("factorization of {0} exceeded the rho budget")]
    FactorizationTimeout(String),
    #[error("volcano walk reached j = 0 or 1728")]
    SpecialVertex,
    #[error("no conductor has the requested class number")]
    NoCandidate,
    #[error("resource limit reached: {0}")]
    ResourceExhausted(String),
    #[error("precondition violated: {0}")]
    Precondition(String),
}

pub type Result<T> = std::result::Result<T, Error>;
