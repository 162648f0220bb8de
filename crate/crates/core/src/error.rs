use thiserror::Error;

/// Errors produced by the factorization toolkit.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("characteristic {0} is not prime")]
    NotPrime(u64),

    #[error("extension degree must be at least 1")]
    ZeroDegree,

    #[error("no built-in reduction polynomial for GF({p}^{m}); supply one explicitly")]
    NoBuiltinPolynomial { p: u64, m: u32 },

    #[error("field order {0} exceeds the supported maximum of {max}", max = crate::galois::MAX_ORDER)]
    FieldTooLarge(u64),

    #[error("invalid reduction polynomial: {0}")]
    BadPolynomial(String),

    #[error("field element {elem} out of range for a field of order {order}")]
    ElementOutOfRange { elem: usize, order: usize },

    #[error("zero has no multiplicative inverse")]
    ZeroInverse,

    #[error("length mismatch: expected {expected}, got {got}")]
    LengthMismatch { expected: usize, got: usize },

    #[error("parity check coefficient vector must be nonzero")]
    ZeroVector,

    #[error("a PMF needs at least 2 outcomes, got {0}")]
    TooFewOutcomes(usize),

    #[error("probability at index {index} is invalid: {value}")]
    InvalidProbability { index: usize, value: f64 },

    #[error("probabilities sum to zero")]
    ZeroSum,

    #[error("operation requires a strictly positive PMF (index {index} has probability {value})")]
    NonPositive { index: usize, value: f64 },

    #[error("log-coordinate vector does not sum to zero (sum = {0})")]
    NotZeroSum(f64),

    #[error("number of variables must be at least 1")]
    NoVariables,

    #[error("factor list is not in canonical projective order: {0}")]
    NonCanonicalOrder(String),

    #[error("stored normalization constant is inconsistent with the factors (mass {0})")]
    NormalizationMismatch(f64),

    #[error("check node coefficient on edge {0} is zero")]
    ZeroCoefficient(usize),

    #[error("invalid Tanner graph: {0}")]
    InvalidGraph(String),

    #[error("state space of {size} assignments exceeds the brute-force cap of {cap}")]
    CapExceeded { size: u128, cap: u128 },

    #[error("unknown export format {0:?}")]
    UnknownFormat(String),

    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    #[error("malformed document: {0}")]
    Malformed(String),
}

pub type Result<T> = std::result::Result<T, Error>;
