use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum BitsliceError {
    #[error("{what} count {got} exceeds the crossbar limit of {max}")]
    Dimension {
        what: &'static str,
        got: usize,
        max: usize,
    },
    #[error("length mismatch: {weights} weights vs {inputs} inputs")]
    LengthMismatch { weights: usize, inputs: usize },
    #[error("value {value:#x} does not fit in {bits} bits")]
    ValueRange { value: u64, bits: u32 },
    #[error("invalid pipeline spec: {0}")]
    Spec(String),
}
