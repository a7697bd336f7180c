use std::path::PathBuf;

use thiserror::Error;

/// Convenience alias used throughout the crate.
pub type Result<T> = std::result::Result<T, Error>;

/// Errors produced by the reconstruction library.
#[derive(Debug, Error)]
pub enum Error {
    /// Two objects that must share a dimension do not.
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    /// A training pair violates a structural requirement (zero output,
    /// mismatched lengths, non-finite entries).
    #[error("training pair {index} is invalid: {reason}")]
    InvalidTrainingPair { index: usize, reason: String },

    /// Every column of the training outputs was rejected as linearly
    /// dependent at the configured tolerance.
    #[error("all output columns were rejected as linearly dependent")]
    AllColumnsDependent,

    /// The Gram matrix cannot be solved without regularization.
    #[error("Gram matrix is numerically singular (rcond = {rcond:.3e})")]
    SingularGram { rcond: f64 },

    /// A vector handed to the restricted frame operator lies outside the
    /// span of the family it was built from.
    #[error("vector lies outside the span of the family (relative defect = {defect:.3e})")]
    NotInSpan { defect: f64 },

    /// A family of vectors contained no nonzero member.
    #[error("family contains no nonzero vector")]
    ZeroFamily,

    /// An image or sinogram does not match the given acquisition geometry.
    #[error("geometry mismatch: {0}")]
    GeometryMismatch(String),

    /// A corpus directory yielded no usable items.
    #[error("corpus is empty")]
    EmptyCorpus,

    /// A split requested more items than the corpus holds.
    #[error("insufficient items: corpus has {available}, split needs {requested}")]
    InsufficientItems { available: usize, requested: usize },

    /// A configuration value is out of its legal range.
    #[error("invalid configuration: {0}")]
    Config(String),

    /// A file exists but its contents do not parse as the expected format.
    #[error("{}: {reason}", path.display())]
    Format { path: PathBuf, reason: String },

    /// The underlying filesystem operation failed.
    #[error("{}: {source}", path.display())]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

impl Error {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io { path: path.into(), source }
    }

    pub(crate) fn format(path: impl Into<PathBuf>, reason: impl Into<String>) -> Self {
        Error::Format { path: path.into(), reason: reason.into() }
    }
}
