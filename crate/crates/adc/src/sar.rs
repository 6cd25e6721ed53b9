use xbar_bitslice::{
    column_samples, scale_round_clamp_with, ColumnSample, Fixed16, PipelineSpec, RawAccumulator,
};

use crate::{AdcCell, AdcError, AdcGrid, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SarResult {
    /// Sample bits inside the kept range, shifted down to bit 0.
    pub code: u32,
    pub clamp_flag: bool,
    pub resolved_bits: u32,
}

/// Truncated successive-approximation conversion of one column sample.
///
/// When the cell reaches into the clamp zone the converter first compares
/// against the lowest clamp-zone bit; if that fires the output saturates and
/// the conversion stops after that single decision.
pub fn sar_convert(sample: &ColumnSample, cell: &AdcCell) -> SarResult {
    let value = sample.value;
    if cell.clamp_test {
        let above = (cell.start_bit + cell.kept_bits).saturating_sub(cell.shift);
        let overflow = value.checked_shr(above).unwrap_or(0) != 0;
        if overflow {
            return SarResult {
                code: 0,
                clamp_flag: true,
                resolved_bits: 1,
            };
        }
    }
    if cell.kept_bits == 0 {
        return SarResult {
            code: 0,
            clamp_flag: false,
            resolved_bits: cell.resolved_bits(),
        };
    }
    let local = cell.start_bit - cell.shift;
    let mask = if cell.kept_bits >= 32 {
        u32::MAX
    } else {
        (1u32 << cell.kept_bits) - 1
    };
    SarResult {
        code: value.checked_shr(local).unwrap_or(0) & mask,
        clamp_flag: false,
        resolved_bits: cell.resolved_bits(),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct AdaptiveOutcome {
    pub value: Fixed16,
    /// Accumulated kept bits before rounding.
    pub truncated: RawAccumulator,
    pub clamped: bool,
    pub resolved_bits: u64,
}

/// Runs the pipeline with every sample converted through `grid`.
pub fn adaptive_pipeline_run(
    spec: &PipelineSpec,
    weights: &[u16],
    inputs: &[u16],
    grid: &AdcGrid,
) -> Result<AdaptiveOutcome> {
    let slices = spec.slices() as usize;
    let planes = spec.planes() as usize;
    if grid.groups.len() != 1
        || grid.groups[0].shift != 0
        || grid.groups[0].slices as usize != slices
        || grid.groups[0].iterations as usize != planes
        || grid.cell_bits != spec.cell_bits
    {
        return Err(AdcError::GridMismatch(format!(
            "expected one {slices}x{planes} group at shift 0"
        )));
    }
    let samples = column_samples(spec, weights, inputs)?;
    let mut acc = 0u64;
    let mut clamped = false;
    let mut resolved = 0u64;
    for s in &samples {
        let cell = grid.cell(s.column_slice as usize, s.iteration as usize);
        let r = sar_convert(s, cell);
        resolved += r.resolved_bits as u64;
        clamped |= r.clamp_flag;
        acc += (r.code as u64) << cell.start_bit;
    }
    let truncated = RawAccumulator::new(acc);
    let value = if clamped {
        Fixed16 {
            value: spec.out_max(),
            scale_exp: spec.drop_bits as i32,
        }
    } else {
        scale_round_clamp_with(spec, truncated)
    };
    Ok(AdaptiveOutcome {
        value,
        truncated,
        clamped,
        resolved_bits: resolved,
    })
}

pub fn adaptive_pipeline_dot_with(
    spec: &PipelineSpec,
    weights: &[u16],
    inputs: &[u16],
    grid: &AdcGrid,
) -> Result<Fixed16> {
    Ok(adaptive_pipeline_run(spec, weights, inputs, grid)?.value)
}

pub fn adaptive_pipeline_dot(weights: &[u16], inputs: &[u16], grid: &AdcGrid) -> Result<Fixed16> {
    adaptive_pipeline_dot_with(&PipelineSpec::DEFAULT, weights, inputs, grid)
}
