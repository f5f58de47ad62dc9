use thiserror::Error;

/// Errors produced anywhere in the pipeline.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("point cloud is empty")]
    EmptyCloud,
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },
    #[error("unsupported ambient dimension {0} (only 1 and 2 are supported)")]
    UnsupportedDimension(usize),
    #[error("non-finite coordinate at point {index}")]
    NonFinite { index: usize },
    #[error("scale factor must be positive, got {0}")]
    InvalidScale(f64),
    #[error("invalid distance matrix: {0}")]
    InvalidDistanceMatrix(String),
    #[error("similarity matrix is singular (no weighting exists)")]
    Singular,
    #[error("input of size {size} exceeds the limit of {limit}: {what}")]
    TooLarge {
        size: usize,
        limit: usize,
        what: &'static str,
    },
    #[error("malformed complex: {0}")]
    MalformedComplex(String),
    #[error("points are not strictly increasing at index {0}")]
    NotSorted(usize),
    #[error("bad interval [{0}, {1}]")]
    BadInterval(f64, f64),
    #[error("bad configuration: {0}")]
    BadConfig(String),
    #[error("too few curve points in the regression window: found {found}, need {needed}")]
    TooFewPoints { found: usize, needed: usize },
    #[error("bad subsample size {size} for a cloud of {available} points")]
    BadSize { size: usize, available: usize },
    #[error("unknown kind `{0}`")]
    UnknownKind(String),
    #[error("parse error at line {line}: {message}")]
    Parse { line: usize, message: String },
    #[error("i/o error: {0}")]
    Io(String),
}

impl Error {
    /// True for failures caused by malformed input rather than by the computation itself.
    pub fn is_input_error(&self) -> bool {
        matches!(
            self,
            Error::Parse { .. }
                | Error::Io(_)
                | Error::EmptyCloud
                | Error::DimensionMismatch { .. }
                | Error::UnsupportedDimension(_)
                | Error::NonFinite { .. }
                | Error::UnknownKind(_)
                | Error::BadConfig(_)
                | Error::BadInterval(..)
                | Error::InvalidScale(_)
        )
    }
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

pub type Result<T> = std::result::Result<T, Error>;
