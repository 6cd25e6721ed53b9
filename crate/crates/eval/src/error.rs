use thiserror::Error;

#[derive(Debug, Error)]
pub enum EvalError {
    #[error(transparent)]
    Mapper(#[from] xbar_mapper::MapperError),
    #[error(transparent)]
    Arch(#[from] xbar_arch::ArchError),
    #[error(transparent)]
    Adc(#[from] xbar_adc::AdcError),
    #[error(transparent)]
    Bitslice(#[from] xbar_bitslice::BitsliceError),
    #[error(transparent)]
    Numerics(#[from] xbar_numerics::NumericsError),
    #[error("numeric path failed its equivalence check: {0}")]
    NumericsGate(String),
    #[error("plan for `{plan}` does not match network `{network}`")]
    PlanMismatch { plan: String, network: String },
    #[error("empty workload suite")]
    EmptySuite,
    #[error("invalid sweep grid: {0}")]
    Grid(String),
    #[error("report encoding failed: {0}")]
    Encode(String),
}

impl From<csv::Error> for EvalError {
    fn from(e: csv::Error) -> Self {
        EvalError::Encode(e.to_string())
    }
}

impl From<serde_json::Error> for EvalError {
    fn from(e: serde_json::Error) -> Self {
        EvalError::Encode(e.to_string())
    }
}
