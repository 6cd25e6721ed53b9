use thiserror::Error;
use xbar_bitslice::BitsliceError;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum NumericsError {
    #[error(transparent)]
    Bitslice(#[from] BitsliceError),
    #[error("karatsuba level {0} is not supported (0..=2)")]
    UnsupportedLevel(u8),
    #[error("strassen needs even square-compatible dimensions, got {rows}x{cols}")]
    OddDimension { rows: usize, cols: usize },
    #[error("matrix shapes do not chain: {left} vs {right}")]
    ShapeMismatch { left: String, right: String },
    #[error("a tile with {have} IMAs cannot host a strassen plan (needs {need})")]
    InsufficientImas { have: usize, need: usize },
}
