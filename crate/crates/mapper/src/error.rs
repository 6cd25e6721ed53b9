use thiserror::Error;

#[derive(Debug, Error)]
pub enum MapperError {
    #[error("network `{0}` has no layers")]
    Empty(String),
    #[error("layer {index} ({layer}) is invalid: {reason}")]
    InvalidLayer {
        index: usize,
        layer: String,
        reason: String,
    },
    #[error("layers {from} and {to} do not chain: {reason}")]
    Chain {
        from: String,
        to: String,
        reason: String,
    },
    #[error("network `{0}` has no conv layers to pace replication")]
    NoConv(String),
    #[error("plan needs {needed} tiles but the chip has {available} (short by {})", needed - available)]
    Capacity { needed: usize, available: usize },
    #[error(transparent)]
    Arch(#[from] xbar_arch::ArchError),
}
