//! Hardware model: a catalog of component costs, the architecture
//! configuration file, and aggregation from crossbars up to a chip.

mod breakdown;
mod catalog;
mod config;
mod error;
mod ima;
mod noise;
mod tile;

pub use breakdown::{Breakdown, Component};
pub use catalog::{Catalog, ComponentSpec, ModelConstants};
pub use config::{
    AdcSettings, ArchConfig, CdacKind, ChipSettings, ImaGeometry, MemorySettings, Toggles,
};
pub use error::ArchError;
pub use ima::{build_ima, htree_output_widths, HtreeModel, ImaConfig, ImaModel};
pub use noise::{active_rows, NoiseParams};
pub use tile::{build_chip, build_tile, ChipModel, TileConfig, TileKind, TileModel};

pub type Result<T> = std::result::Result<T, ArchError>;

/// Version of the architecture file format and of every emitted report.
pub const SCHEMA_VERSION: u32 = 1;
