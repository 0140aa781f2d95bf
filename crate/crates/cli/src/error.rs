use std::path::PathBuf;

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("config error: {0}")]
    Config(String),
    #[error("cannot parse config: {0}")]
    Json(#[from] serde_json::Error),
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("not a field file (magic {0:?})")]
    BadMagic([u8; 4]),
    #[error("unsupported field file version {0}")]
    UnsupportedVersion(u32),
    #[error("unknown field kind {0}")]
    UnknownKind(u8),
    #[error("field file length {found} bytes, expected {expected}")]
    LengthMismatch { expected: usize, found: usize },
    #[error("checksum mismatch: stored {stored:08x}, computed {computed:08x}")]
    CrcMismatch { stored: u32, computed: u32 },
    #[error("plane out of range: {0}")]
    OutOfRange(String),
    #[error("numerical failure: {0}")]
    Numerical(#[from] cylspec::Error),
}

impl Error {
    pub(crate) fn io(path: impl Into<PathBuf>) -> impl FnOnce(std::io::Error) -> Error {
        let path = path.into();
        move |source| Error::Io { path, source }
    }

    /// Process exit status: 3 for numerical failures, 2 for everything else.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Numerical(_) => 3,
            _ => 2,
        }
    }
}
