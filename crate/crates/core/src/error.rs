use std::path::PathBuf;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("line {line}: {message}")]
    MalformedRow { line: u64, message: String },

    #[error("line {line}, column {column}: `{value}` is not a number")]
    NonNumeric {
        line: u64,
        column: usize,
        value: String,
    },

    #[error("line {line}, column {column}: missing value (incomplete records are not supported)")]
    MissingValue { line: u64, column: usize },

    #[error("label column {0} not found")]
    MissingLabel(String),

    #[error("dataset needs at least 2 classes, found {0}")]
    TooFewClasses(usize),

    #[error("empty input: {0}")]
    Empty(&'static str),

    #[error("attribute {attribute}: value {value} is outside the binning range")]
    OutOfRange { attribute: usize, value: f64 },

    #[error("class {class} has {count} members, fewer than the {k} folds requested")]
    ClassTooSmall { class: usize, count: usize, k: usize },

    #[error("length mismatch: expected {expected}, found {found}")]
    LengthMismatch { expected: usize, found: usize },

    #[error("pair value {value} lies outside the 1..={grid} grid")]
    OffGrid { value: u32, grid: u32 },

    #[error("decode failed: schedule levels for pairs {0:?} are missing from the image")]
    MissingLevels(Vec<usize>),

    #[error("decode failed: displacement of pairs {0:?} cannot be inverted uniquely")]
    AmbiguousDecode(Vec<usize>),

    #[error("image geometry mismatch: {0}")]
    Geometry(String),

    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("non-finite loss at epoch {epoch}, batch {batch}")]
    NonFiniteLoss { epoch: usize, batch: usize },

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("unsupported: {0}")]
    Unsupported(String),

    #[error(transparent)]
    Image(#[from] image::ImageError),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }

    pub(crate) fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidArgument(msg.into())
    }
}
