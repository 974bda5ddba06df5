use std::path::PathBuf;

/// Errors produced by the denoising, transform and metric routines.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("I/O error on {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("unsupported magic number {0:?} (expected P5 or P6)")]
    UnsupportedMagic(String),
    #[error("malformed header: {0}")]
    MalformedHeader(String),
    #[error("unsupported maxval {0} (only 255 is supported)")]
    UnsupportedMaxval(u32),
    #[error("truncated payload: expected {expected} bytes, found {found}")]
    TruncatedPayload { expected: usize, found: usize },
    #[error("invalid image: {0}")]
    InvalidImage(String),
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),
    #[error("image too small: {0}")]
    TooSmall(String),
    #[error("infeasible level count {levels} for a {width}x{height} plane")]
    InfeasibleLevels {
        levels: usize,
        width: usize,
        height: usize,
    },
    #[error("malformed wavelet pyramid: {0}")]
    MalformedPyramid(String),
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("config error at line {line}: {message}")]
    Config { line: usize, message: String },
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

impl Error {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }
}
