use thiserror::Error;
use xbar_bitslice::BitsliceError;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum AdcError {
    #[error(transparent)]
    Bitslice(#[from] BitsliceError),
    #[error("guard bits {guard} exceed the {limit} dropped bits")]
    GuardTooLarge { guard: u32, limit: u32 },
    #[error("grid does not match the pipeline: {0}")]
    GridMismatch(String),
    #[error("invalid ADC power model: {0}")]
    PowerModel(String),
}
