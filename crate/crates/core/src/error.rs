use std::path::PathBuf;

use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("i/o error on {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("image error on {path}: {message}")]
    Image { path: PathBuf, message: String },

    #[error("npy format error: {0}")]
    NpyFormat(String),

    #[error("unknown color ({r},{g},{b}) at ({x},{y})")]
    UnknownColor { r: u8, g: u8, b: u8, x: u32, y: u32 },

    #[error("label {label} is not covered by the palette ({size} entries)")]
    LabelOutOfPalette { label: u8, size: usize },

    #[error("dimension mismatch: expected {expected:?}, found {found:?}")]
    DimensionMismatch {
        expected: (usize, usize),
        found: (usize, usize),
    },

    #[error("length mismatch: expected {expected}, found {found}")]
    LengthMismatch { expected: usize, found: usize },

    #[error("invalid value: {0}")]
    InvalidValue(String),

    #[error("uncovered pixel ({x},{y}) while merging patches")]
    UncoveredPixel { x: usize, y: usize },

    #[error("non-submodular pairwise term between pixels {p} and {q}")]
    NonSubmodular { p: usize, q: usize },

    #[error("manifest error: {0}")]
    Manifest(String),

    #[error("invalid pdf table: {0}")]
    InvalidTable(String),
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }
}
