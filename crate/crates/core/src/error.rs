use thiserror::Error;

/// Errors raised by the analysis library.
#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    /// A parameter violates an operation's precondition.
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    /// The supplied modulus is not prime.
    #[error("{0} is not prime")]
    NotPrime(String),

    /// The generator is not a primitive root of the modulus.
    #[error("{m} is not a primitive root modulo {p}")]
    NotPrimitiveRoot { p: String, m: String },

    /// A value does not fit the machine-sized index space needed for
    /// trajectory and matrix operations.
    #[error("{0} is too large for desk-scale trajectory operations")]
    TooLarge(String),

    /// Not enough samples to build the requested data matrices.
    #[error("insufficient data: need {needed} samples, have {available}")]
    InsufficientData { needed: usize, available: usize },

    /// Operand shapes do not agree.
    #[error("dimension mismatch: expected {expected}, got {actual}")]
    DimensionMismatch { expected: usize, actual: usize },

    /// The operation is only defined for the canonical companion system.
    #[error("non-canonical system: {0}")]
    NonCanonical(String),

    /// Per-eigenvalue residues disagree with each other.
    #[error("inconsistent recovery: {0}")]
    Inconsistent(String),

    /// The available constraints do not pin the exponent down.
    #[error("ambiguous recovery: exponent only determined modulo {modulus}, need {needed}")]
    Ambiguous { modulus: usize, needed: usize },

    /// A transformed coordinate is too small to divide by.
    #[error("degenerate coordinate at eigenvalue index {0}")]
    Degenerate(usize),

    /// Input data could not be parsed.
    #[error("malformed input: {0}")]
    MalformedInput(String),

    /// An internal consistency check failed.
    #[error("internal consistency failure: {0}")]
    Internal(String),
}

pub type Result<T> = std::result::Result<T, Error>;
