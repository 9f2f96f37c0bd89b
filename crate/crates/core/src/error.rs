use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("index sequence must start at k_0 = 0, got {0}")]
    FirstTermNonzero(i64),
    #[error("index sequence is not strictly increasing at position {at}")]
    NotStrictlyIncreasing { at: u64 },
    #[error("prefix has {len} terms but the arithmetic tail starts at n0 = {n0}")]
    PrefixLengthMismatch { len: usize, n0: u64 },
    #[error("invalid degree {0}: the period must be at least 2")]
    InvalidDegree(u64),
    #[error("leading L coefficient must be +1 or -1, got {0}")]
    LeadingCoefficient(i64),
    #[error("coefficient list {0} must not be empty")]
    EmptyCoefficients(&'static str),
    #[error("initial values do not seed the recurrence: index {0} has no seed and cannot be derived")]
    SeedTooShort(u64),
    #[error("initial values must be non-negative (index {0})")]
    NegativeSeed(u64),
    #[error("initial values at indices {first} and {second} lie in one flat block but differ")]
    InconsistentSeed { first: u64, second: u64 },
    #[error("modulus must be at least {min}, got {got}")]
    InvalidModulus { min: u64, got: u64 },
    #[error("argument out of domain: {0}")]
    Domain(String),
    #[error("digit {digit} at position {position} is zero; the formula needs zero-free digits")]
    ZeroDigit { position: usize, digit: u64 },
    #[error("this congruence needs an even base, got m = {0}")]
    OddBase(u64),
    #[error("hypothesis violated: {0}")]
    HypothesisViolated(String),
    #[error("unsupported triple: {0}")]
    UnsupportedTriple(String),
    #[error("n = {n} is below the validity threshold {min} for level {level}")]
    BelowThreshold { n: u64, min: u64, level: usize },
    #[error("parse error: {0}")]
    Parse(String),
}

pub type Result<T> = std::result::Result<T, Error>;
