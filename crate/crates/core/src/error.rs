use thiserror::Error;

/// Errors raised across the library.
///
/// Validation and configuration problems map to CLI exit code 1; every
/// numeric failure (overflow guard, coverage, solver) maps to exit code 2.
#[derive(Debug, Error)]
pub enum Error {
    #[error("{op}: invalid input at index {index}: {reason}")]
    InvalidAt {
        op: &'static str,
        index: usize,
        reason: String,
    },

    #[error("{op}: {reason}")]
    Invalid { op: &'static str, reason: String },

    #[error("{op}: exponential magnitude e^{exponent:.3} exceeds the representable range")]
    Overflow { op: &'static str, exponent: f64 },

    #[error("band_decompose: spectrum escapes [{lo}, {hi}] with escaped mass {escaped_mass:.3e}")]
    Coverage {
        lo: f64,
        hi: f64,
        escaped_mass: f64,
    },

    #[error("{module}::{op}: {reason}")]
    Solver {
        module: &'static str,
        op: &'static str,
        reason: String,
    },

    #[error("{op}: entry (lambda index {row}, band {col}) failed: {source}")]
    Entry {
        op: &'static str,
        row: usize,
        col: usize,
        #[source]
        source: Box<Error>,
    },

    #[error("band {band}: {source}")]
    Band {
        band: usize,
        #[source]
        source: Box<Error>,
    },

    #[error("config: {0}")]
    Config(String),

    #[error("io: {0}")]
    Io(#[from] std::io::Error),
}

impl Error {
    pub(crate) fn invalid(op: &'static str, reason: impl Into<String>) -> Self {
        Error::Invalid {
            op,
            reason: reason.into(),
        }
    }

    pub(crate) fn solver(module: &'static str, op: &'static str, reason: impl Into<String>) -> Self {
        Error::Solver {
            module,
            op,
            reason: reason.into(),
        }
    }

    /// True for input validation failures, as opposed to numeric failures.
    pub fn is_validation(&self) -> bool {
        match self {
            Error::InvalidAt { .. } | Error::Invalid { .. } | Error::Config(_) => true,
            Error::Entry { source, .. } | Error::Band { source, .. } => source.is_validation(),
            _ => false,
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
