use std::fmt;

/// Failure classes, each with its own process exit code.
#[derive(Debug)]
pub enum CliError {
    /// Bad parameters or configuration values (exit 2).
    Invalid(String),
    /// Input data that cannot be parsed (exit 3).
    Malformed(String),
    /// A computed result disagrees with its oracle or invariant (exit 4).
    Inconsistent(String),
    /// Filesystem trouble while writing results (exit 1).
    Io(String),
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Io(_) => 1,
            CliError::Invalid(_) => 2,
            CliError::Malformed(_) => 3,
            CliError::Inconsistent(_) => 4,
        }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Invalid(m) => write!(f, "invalid parameters: {m}"),
            CliError::Malformed(m) => write!(f, "malformed input: {m}"),
            CliError::Inconsistent(m) => write!(f, "consistency failure: {m}"),
            CliError::Io(m) => write!(f, "i/o error: {m}"),
        }
    }
}

impl From<koopman_dh::Error> for CliError {
    fn from(e: koopman_dh::Error) -> Self {
        use koopman_dh::Error as E;
        let msg = e.to_string();
        match e {
            E::InvalidParameter(_)
            | E::NotPrime(_)
            | E::NotPrimitiveRoot { .. }
            | E::TooLarge(_)
            | E::NonCanonical(_)
            | E::DimensionMismatch { .. } => CliError::Invalid(msg),
            E::MalformedInput(_) | E::InsufficientData { .. } => CliError::Malformed(msg),
            E::Inconsistent(_) | E::Ambiguous { .. } | E::Degenerate(_) | E::Internal(_) => {
                CliError::Inconsistent(msg)
            }
        }
    }
}

pub type CliResult<T> = Result<T, CliError>;
