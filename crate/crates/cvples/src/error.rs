use std::path::PathBuf;
use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("unknown configuration key `{0}`")]
    UnknownKey(String),

    #[error("bad value `{value}` for key `{key}`: {reason}")]
    BadValue {
        key: String,
        value: String,
        reason: String,
    },

    #[error("missing required key `{0}`")]
    MissingRequired(String),

    #[error("malformed line {line}: `{text}`")]
    Syntax { line: usize, text: String },

    #[error("snapshot {0}: bad magic")]
    BadMagic(PathBuf),

    #[error("snapshot {path}: format version {found}, expected {expected}")]
    VersionMismatch {
        path: PathBuf,
        found: u32,
        expected: u32,
    },

    #[error("snapshot {path}: dimensions {found:?}, expected {expected:?}")]
    DimensionMismatch {
        path: PathBuf,
        found: [usize; 3],
        expected: [usize; 3],
    },

    #[error("snapshot {0}: payload length does not match the header")]
    TruncatedFile(PathBuf),

    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error(transparent)]
    Core(#[from] cvples_core::Error),
}

impl Error {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }

    pub(crate) fn bad(key: &str, value: &str, reason: impl Into<String>) -> Self {
        Error::BadValue {
            key: key.to_string(),
            value: value.to_string(),
            reason: reason.into(),
        }
    }

    /// Configuration problems, as opposed to runtime failures.
    pub fn is_config_error(&self) -> bool {
        matches!(
            self,
            Error::UnknownKey(_) | Error::BadValue { .. } | Error::MissingRequired(_) | Error::Syntax { .. }
        ) || matches!(self, Error::Core(cvples_core::Error::InvalidParameter(_)))
    }
}
