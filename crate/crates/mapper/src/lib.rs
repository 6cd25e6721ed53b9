//! Layer-to-hardware mapping.
//!
//! Every conv or FC layer is a `(Kx·Ky·Ni) × No` matrix of 16-bit weights
//! folded onto IMAs; an IMA never hosts two layers. Early conv layers are
//! replicated until every stage keeps pace with the slowest one, and tile
//! buffers hold the input rows a layer still needs.

mod error;
mod fold;
mod network;
mod plan;

pub use error::MapperError;
pub use fold::{
    buffer_requirement, crossbars_for_layer, replication_factors, suite_underutilization,
    BufferMode, Granularity, LayerFold, UnderUtilization,
};
pub use network::{LayerDesc, LayerInstance, LayerKind, NetworkDesc};
pub use plan::{plan_network, Fragment, LayerPlan, MappingPlan, TilePlan};

pub type Result<T> = std::result::Result<T, MapperError>;
