use std::io;
use std::path::PathBuf;

use thiserror::Error;

use crate::grid::{GridShape, Pixel};

#[derive(Debug, Error)]
pub enum Error {
    #[error("format error at byte {offset}: {message}")]
    Format { offset: usize, message: String },

    #[error("{}: {source}", path.display())]
    Io {
        path: PathBuf,
        #[source]
        source: io::Error,
    },

    #[error("validation error: {0}")]
    Validation(String),

    #[error("shape mismatch: expected {expected}, got {actual}")]
    ShapeMismatch { expected: GridShape, actual: GridShape },

    #[error("center has no direction")]
    CenterHasNoDirection,

    #[error("center {center} out of bounds for grid {shape}")]
    CenterOutOfBounds { center: Pixel, shape: GridShape },

    #[error("no foreground")]
    NoForeground,

    #[error("grid too large for brute force evaluation: {0}")]
    GridTooLarge(GridShape),

    #[error("probabilities inconsistent with logits at pixel {pixel}: |p - sigmoid(z)| = {gap:e}")]
    InconsistentLogits { pixel: Pixel, gap: f64 },

    #[error("optimization diverged at step {step}: loss {loss:e}")]
    Diverged { step: usize, loss: f64 },

    #[error("non-finite loss at epoch {epoch}, batch {batch}")]
    NonFinite { epoch: usize, batch: usize },

    #[error("insufficient pairs: {0} nonzero differences, at least 5 required")]
    InsufficientPairs(usize),

    #[error("length mismatch: {0} vs {1}")]
    LengthMismatch(usize, usize),

    #[error("invalid config field `{field}`: {message}")]
    Config { field: &'static str, message: String },
}

impl Error {
    pub(crate) fn format(offset: usize, message: impl Into<String>) -> Self {
        Error::Format { offset, message: message.into() }
    }

    pub(crate) fn io(path: impl Into<PathBuf>, source: io::Error) -> Self {
        Error::Io { path: path.into(), source }
    }

    pub(crate) fn config(field: &'static str, message: impl Into<String>) -> Self {
        Error::Config { field, message: message.into() }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
