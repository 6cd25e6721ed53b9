//! Bit-exact semantics of the crossbar dot-product pipeline.
//!
//! A 16-bit weight is stored as eight 2-bit cells spread over eight crossbars,
//! a 16-bit input is streamed one bit per cycle, every column produces a small
//! analog sum that is digitised, and two levels of shift-and-add rebuild the
//! full-precision dot product. [`reference_dot`] is the plain integer oracle
//! the pipeline must always agree with.

mod error;
mod pipeline;
mod spec;
mod types;

pub use error::BitsliceError;
pub use pipeline::{
    column_samples, crossbar_column_mac, pipeline_dot, pipeline_dot_with, pipeline_matvec,
    pipeline_raw, plane_inputs, plane_inputs_with, reference_dot, reference_dot_with,
    scale_round_clamp, scale_round_clamp_with, shift_add_columns, shift_add_columns_with,
    shift_add_iterations, slice_matrix, slice_weights, slice_weights_with,
};
pub use spec::PipelineSpec;
pub use types::{ColumnSample, Fixed16, InputBitPlanes, RawAccumulator, SlicedWeightMatrix};

pub type Result<T> = std::result::Result<T, BitsliceError>;
