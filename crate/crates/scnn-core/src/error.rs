//! Error type shared across the crate.

use thiserror::Error;

pub type Result<T> = std::result::Result<T, ScnnError>;

#[derive(Debug, Error)]
pub enum ScnnError {
    #[error(
        "{op}: shape mismatch, left is {left_rows}x{left_cols}, right is {right_rows}x{right_cols}"
    )]
    ShapeMismatch {
        op: &'static str,
        left_rows: usize,
        left_cols: usize,
        right_rows: usize,
        right_cols: usize,
    },

    #[error("matrix is not square ({rows}x{cols})")]
    NotSquare { rows: usize, cols: usize },

    #[error("invalid parameter: {0}")]
    InvalidParam(String),

    #[error("io error: {0}")]
    Io(#[from] std::io::Error),

    #[error("bad magic number: expected 0x{expected:08x}, found 0x{found:08x}")]
    BadMagic { expected: u32, found: u32 },

    #[error("truncated input at byte offset {offset}: {what}")]
    Truncated { offset: usize, what: String },

    #[error("image/label count mismatch: {images} images but {labels} labels")]
    CountMismatch { images: usize, labels: usize },

    #[error("unsupported format: {0}")]
    UnsupportedFormat(String),

    #[error("unsupported model file version {found} (expected {expected})")]
    UnsupportedVersion { expected: u32, found: u32 },

    #[error("non-finite energy during {step}")]
    NonFiniteEnergy { step: String },

    #[error("empty input: {0}")]
    EmptyInput(String),

    #[error("{what}: length mismatch ({left} vs {right})")]
    LengthMismatch {
        what: &'static str,
        left: usize,
        right: usize,
    },

    #[error("malformed data: {0}")]
    MalformedData(String),
}

impl ScnnError {
    /// Process exit code the CLI maps this error to.
    pub fn exit_code(&self) -> i32 {
        match self {
            ScnnError::InvalidParam(_) => 2,
            ScnnError::NonFiniteEnergy { .. } => 4,
            _ => 3,
        }
    }
}
