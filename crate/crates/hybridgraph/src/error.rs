use std::path::PathBuf;

/// Crate-wide error type. Variants map onto the three failure classes the
/// CLI distinguishes by exit code: bad input, I/O trouble, and violated
/// internal guarantees.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    /// The caller handed us something invalid: malformed records, impossible
    /// parameters, inconsistent configuration.
    #[error("invalid input: {0}")]
    InvalidInput(String),

    /// An operating-system level failure while reading or writing `path`.
    #[error("i/o failure on {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    /// An internal guarantee did not hold, for example two engines that must
    /// agree produced different answers. Always a bug, never a user error.
    #[error("correctness violation: {0}")]
    Correctness(String),
}

impl Error {
    pub fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidInput(msg.into())
    }

    pub fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }

    pub fn correctness(msg: impl Into<String>) -> Self {
        Error::Correctness(msg.into())
    }
}

pub type Result<T> = std::result::Result<T, Error>;
