use thiserror::Error;

/// Errors raised by the coding toolkit.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("modulus {0} is not prime")]
    NotPrime(u64),
    #[error("modulus {0} is out of range (need 2 <= p <= 2^31)")]
    ModulusOutOfRange(u64),
    #[error("field mismatch: F_{left} vs F_{right}")]
    FieldMismatch { left: u64, right: u64 },
    #[error("inversion of zero in F_{0}")]
    InverseOfZero(u64),
    #[error("residue {value} is out of range for F_{p}")]
    ResidueOutOfRange { value: u64, p: u64 },
    #[error("dimension mismatch: expected {expected}, got {actual}")]
    DimensionMismatch { expected: usize, actual: usize },
    #[error("count mismatch for {what}: expected {expected}, got {actual}")]
    CountMismatch {
        what: &'static str,
        expected: usize,
        actual: usize,
    },
    #[error("invalid degree {degree}: {reason}")]
    InvalidDegree { degree: usize, reason: String },
    #[error("the partial-gradient polynomial is constant; coding schemes need deg g >= 1")]
    ConstantPolynomial,
    #[error("polynomial degree {actual} exceeds the scheme degree {scheme}")]
    DegreeTooLarge { actual: usize, scheme: usize },
    #[error("field F_{p} is too small: {reason}; smallest sufficient prime is {min_prime}")]
    FieldTooSmall {
        p: u64,
        reason: String,
        min_prime: u64,
    },
    #[error("invalid parameters: {0}")]
    InvalidParams(String),
    #[error("parameter corruption: zero denominator while computing {0}")]
    ParameterCorruption(&'static str),
    #[error("index {index} out of range 1..={max}")]
    IndexOutOfRange { index: usize, max: usize },
    #[error("unknown scheme {0:?}")]
    UnknownScheme(String),
    #[error("enumeration budget exceeded: need {required} states, budget is {budget}")]
    BudgetExceeded { required: u128, budget: u128 },
}

pub type Result<T> = std::result::Result<T, Error>;
