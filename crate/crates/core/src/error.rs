use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("{0} is not a fundamental discriminant")]
    NotFundamental(i128),
    #[error("{0} is not an element of P* (8, -4, -8 or p* for an odd prime p)")]
    NotPrimeStar(i128),
    #[error("{0} is not an odd prime")]
    NotOddPrime(u64),
    #[error("degenerate subfield: both generators equal {0}")]
    DegenerateSubfield(i64),
    #[error("forms have discriminants {0} and {1}")]
    DiscriminantMismatch(i128, i128),
    #[error("invalid field: {0}")]
    InvalidField(String),
    #[error("symbol [{0},{1}] is not defined")]
    UndefinedSymbol(i64, i64),
    #[error("a-value is undefined for fields containing the eighth roots of unity")]
    Zeta8Context,
    #[error("expected {expected} ramified primes, found {found}")]
    RamifiedCount { expected: usize, found: usize },
    #[error("bound {bound} out of range: {reason}")]
    OutOfRange { bound: u64, reason: String },
    #[error("integer overflow while computing {0}")]
    RangeFault(String),
    #[error("invalid sieve configuration: {0}")]
    SieveConfig(String),
    #[error("parse error: {0}")]
    Parse(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
