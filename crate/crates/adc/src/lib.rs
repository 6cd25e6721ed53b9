//! Adaptive ADC resolution.
//!
//! Each column sample of the bit-sliced pipeline lands at a fixed global bit
//! offset of the final accumulator. Bits below the retained output window are
//! discarded by the final rounding and bits above it only ever cause a clamp,
//! so the ADC only needs to resolve the bits that overlap the window plus one
//! comparison to detect overflow. [`AdcGrid`] records that per-sample budget,
//! [`sar_convert`] models the truncated conversion and [`adc_energy`] prices it.

mod energy;
mod error;
mod grid;
mod sar;
mod search;

pub use energy::{adc_energy, relative_energy, AdcPowerModel, CdacModel, WindowEnergy};
pub use error::AdcError;
pub use grid::{
    derive_grid, derive_grid_for, full_grid, karatsuba_groups, max_full_resolution_per_iteration,
    AdcCell, AdcGrid, SliceGroup,
};
pub use sar::{
    adaptive_pipeline_dot, adaptive_pipeline_dot_with, adaptive_pipeline_run, sar_convert,
    AdaptiveOutcome, SarResult,
};
pub use search::{count_mismatches, exhaustive_cases, search_exact_guard, GuardSearch};

pub type Result<T> = std::result::Result<T, AdcError>;
