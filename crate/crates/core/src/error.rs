use thiserror::Error;

/// Errors raised by the number-theoretic operations of this crate.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("{0} is not a fundamental discriminant")]
    NotFundamental(i64),

    #[error("{0} is not prime")]
    NotPrime(u64),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("precondition violated: {0}")]
    Precondition(String),

    #[error("{a} is not a quadratic residue modulo {p}")]
    NotResidue { a: i64, p: u64 },

    #[error("{p} divides {a}")]
    PrimeDividesArgument { a: i64, p: u64 },

    /// The local splitting criterion is only implemented for odd primes of
    /// degree one that are coprime to the base discriminant.
    #[error("splitting criterion out of scope for the prime above {p}: {reason}")]
    OutOfScope { p: u64, reason: &'static str },

    #[error("boundary prime {0} is excluded by convention")]
    BoundaryPrime(u64),

    #[error("search cap {cap} exceeded")]
    CapExceeded { cap: u64 },

    #[error("search ceiling {ceiling} exceeded")]
    CeilingExceeded { ceiling: u64 },

    #[error("mismatched base fields: {0} vs {1}")]
    BaseFieldMismatch(i64, i64),

    #[error("no admissible quadratic field found below the bound {d_bound}")]
    NoAdmissibleField { d_bound: u64 },

    #[error("insufficient checkpoints: {0}")]
    InsufficientCheckpoints(String),

    #[error("verification failed: {0}")]
    VerificationFailed(String),

    #[error("arithmetic overflow in {0}")]
    Overflow(&'static str),

    #[error("parse error: {0}")]
    Parse(String),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
