use std::path::PathBuf;

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    /// Bad lattice description (site count, coupling values, bond count).
    #[error("invalid lattice: {0}")]
    InvalidLattice(String),

    /// An argument violated an operation's precondition.
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    /// Arguments fall outside the range an algorithm is validated for.
    #[error("outside supported envelope: {0}")]
    OutOfEnvelope(String),

    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("superposition has zero norm")]
    ZeroNorm,

    #[error("correlation matrix kind mismatch: expected {expected}, got {got}")]
    KindMismatch {
        expected: &'static str,
        got: &'static str,
    },

    #[error("symmetric eigensolver did not converge for a {0}x{0} matrix")]
    EigenNonConvergence(usize),

    /// A computed quantity broke a numerical guarantee (unitarity, normalization, ...).
    #[error("numerical contract violated: {0}")]
    NumericalContract(String),

    #[error("configuration error in `{field}`: {message}")]
    Config { field: String, message: String },

    #[error("I/O error at {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

impl Error {
    pub(crate) fn config(field: impl Into<String>, message: impl Into<String>) -> Self {
        Error::Config {
            field: field.into(),
            message: message.into(),
        }
    }

    pub fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }

    /// Process exit code: 1 validation, 2 numerical contract, 3 I/O.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::EigenNonConvergence(_) | Error::NumericalContract(_) => 2,
            Error::Io { .. } => 3,
            _ => 1,
        }
    }
}
