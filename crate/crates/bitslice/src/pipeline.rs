use crate::spec::bits_for;
use crate::{
    BitsliceError, ColumnSample, Fixed16, InputBitPlanes, PipelineSpec, RawAccumulator, Result,
    SlicedWeightMatrix,
};

fn check_values(values: &[u16], bits: u32) -> Result<()> {
    match values
        .iter()
        .find(|&&v| bits < 16 && (v as u32) >> bits != 0)
    {
        Some(&v) => Err(BitsliceError::ValueRange {
            value: v as u64,
            bits,
        }),
        None => Ok(()),
    }
}

fn check_rows(spec: &PipelineSpec, rows: usize) -> Result<()> {
    if rows > spec.max_rows {
        return Err(BitsliceError::Dimension {
            what: "row",
            got: rows,
            max: spec.max_rows,
        });
    }
    Ok(())
}

/// Slices a weight column with the default 16-bit spec.
pub fn slice_weights(weights: &[u16]) -> Result<SlicedWeightMatrix> {
    slice_weights_with(&PipelineSpec::DEFAULT, weights)
}

pub fn slice_weights_with(spec: &PipelineSpec, weights: &[u16]) -> Result<SlicedWeightMatrix> {
    slice_matrix(spec, weights, weights.len(), 1)
}

/// Slices a row-major `rows × cols` weight matrix.
pub fn slice_matrix(
    spec: &PipelineSpec,
    weights: &[u16],
    rows: usize,
    cols: usize,
) -> Result<SlicedWeightMatrix> {
    spec.validate()?;
    check_rows(spec, rows)?;
    if cols > spec.max_cols {
        return Err(BitsliceError::Dimension {
            what: "column",
            got: cols,
            max: spec.max_cols,
        });
    }
    if weights.len() != rows * cols {
        return Err(BitsliceError::LengthMismatch {
            weights: weights.len(),
            inputs: rows * cols,
        });
    }
    check_values(weights, spec.weight_bits)?;
    let mask = spec.cell_max() as u16;
    let slices = (0..spec.slices())
        .map(|s| {
            let shift = s * spec.cell_bits;
            weights
                .iter()
                .map(|&w| ((w >> shift) & mask) as u8)
                .collect()
        })
        .collect();
    Ok(SlicedWeightMatrix {
        rows,
        cols,
        cell_bits: spec.cell_bits,
        slices,
    })
}

pub fn plane_inputs(inputs: &[u16]) -> Result<InputBitPlanes> {
    plane_inputs_with(&PipelineSpec::DEFAULT, inputs)
}

pub fn plane_inputs_with(spec: &PipelineSpec, inputs: &[u16]) -> Result<InputBitPlanes> {
    spec.validate()?;
    check_rows(spec, inputs.len())?;
    check_values(inputs, spec.input_bits)?;
    let planes = (0..spec.planes())
        .map(|t| inputs.iter().map(|&x| ((x >> t) & 1) as u8).collect())
        .collect();
    Ok(InputBitPlanes {
        rows: inputs.len(),
        planes,
    })
}

/// Analog column sum: Σ cell·bit over the rows.
///
/// # Panics
/// Panics if the column and the bit plane have different lengths.
pub fn crossbar_column_mac(cells: &[u8], bits: &[u8]) -> u32 {
    assert_eq!(
        cells.len(),
        bits.len(),
        "column and plane row counts differ"
    );
    cells
        .iter()
        .zip(bits)
        .map(|(&c, &b)| (c as u32) * (b as u32))
        .sum()
}

/// Combines one iteration's slice samples: Σ sample_s · 4^s.
pub fn shift_add_columns(samples: &[ColumnSample]) -> u64 {
    shift_add_columns_with(PipelineSpec::DEFAULT.cell_bits, samples)
}

pub fn shift_add_columns_with(cell_bits: u32, samples: &[ColumnSample]) -> u64 {
    samples
        .iter()
        .map(|s| (s.value as u64) << (s.column_slice as u32 * cell_bits))
        .sum()
}

/// Combines iteration partials: Σ partial_t · 2^t.
pub fn shift_add_iterations(partials: &[u64]) -> RawAccumulator {
    RawAccumulator::new(partials.iter().enumerate().map(|(t, &p)| p << t).sum())
}

pub fn reference_dot(weights: &[u16], inputs: &[u16]) -> Result<RawAccumulator> {
    reference_dot_with(&PipelineSpec::DEFAULT, weights, inputs)
}

/// Golden integer oracle: exact Σ w·x.
pub fn reference_dot_with(
    spec: &PipelineSpec,
    weights: &[u16],
    inputs: &[u16],
) -> Result<RawAccumulator> {
    check_pair(spec, weights, inputs)?;
    Ok(RawAccumulator::new(
        weights
            .iter()
            .zip(inputs)
            .map(|(&w, &x)| w as u64 * x as u64)
            .sum(),
    ))
}

fn check_pair(spec: &PipelineSpec, weights: &[u16], inputs: &[u16]) -> Result<()> {
    if weights.len() != inputs.len() {
        return Err(BitsliceError::LengthMismatch {
            weights: weights.len(),
            inputs: inputs.len(),
        });
    }
    check_rows(spec, weights.len())?;
    check_values(weights, spec.weight_bits)?;
    check_values(inputs, spec.input_bits)
}

pub fn scale_round_clamp(raw: RawAccumulator) -> Fixed16 {
    scale_round_clamp_with(&PipelineSpec::DEFAULT, raw)
}

/// Drops `drop_bits` LSBs with round-half-up and saturates on overflow.
///
/// A carry produced by the rounding that reaches the clamp bit saturates too.
pub fn scale_round_clamp_with(spec: &PipelineSpec, raw: RawAccumulator) -> Fixed16 {
    let half = if spec.drop_bits == 0 {
        0
    } else {
        1u64 << (spec.drop_bits - 1)
    };
    let rounded = (raw.value + half) >> spec.drop_bits;
    let value = if rounded > spec.out_max() as u64 {
        spec.out_max()
    } else {
        rounded as u16
    };
    Fixed16 {
        value,
        scale_exp: spec.drop_bits as i32,
    }
}

/// All column samples for one weight column and one input vector,
/// iteration-major (`index = iteration * slices + slice`).
pub fn column_samples(
    spec: &PipelineSpec,
    weights: &[u16],
    inputs: &[u16],
) -> Result<Vec<ColumnSample>> {
    check_pair(spec, weights, inputs)?;
    let w = slice_weights_with(spec, weights)?;
    let x = plane_inputs_with(spec, inputs)?;
    let mut out = Vec::with_capacity((spec.slices() * spec.planes()) as usize);
    for (t, plane) in x.planes.iter().enumerate() {
        for (s, cells) in w.slices.iter().enumerate() {
            out.push(ColumnSample {
                value: crossbar_column_mac(cells, plane),
                column_slice: s as u8,
                iteration: t as u8,
            });
        }
    }
    Ok(out)
}

/// Full bit-serial pipeline without the final scaling.
pub fn pipeline_raw(
    spec: &PipelineSpec,
    weights: &[u16],
    inputs: &[u16],
) -> Result<RawAccumulator> {
    let samples = column_samples(spec, weights, inputs)?;
    let slices = spec.slices() as usize;
    let sample_limit = 1u64 << bits_for(spec.max_sample());
    let partials: Vec<u64> = samples
        .chunks(slices)
        .map(|iter| {
            debug_assert!(iter.iter().all(|s| (s.value as u64) < sample_limit));
            shift_add_columns_with(spec.cell_bits, iter)
        })
        .collect();
    Ok(shift_add_iterations(&partials))
}

pub fn pipeline_dot(weights: &[u16], inputs: &[u16]) -> Result<Fixed16> {
    pipeline_dot_with(&PipelineSpec::DEFAULT, weights, inputs)
}

pub fn pipeline_dot_with(spec: &PipelineSpec, weights: &[u16], inputs: &[u16]) -> Result<Fixed16> {
    Ok(scale_round_clamp_with(
        spec,
        pipeline_raw(spec, weights, inputs)?,
    ))
}

/// Runs the pipeline for every column of a sliced matrix against one input vector.
pub fn pipeline_matvec(
    spec: &PipelineSpec,
    weights: &SlicedWeightMatrix,
    inputs: &InputBitPlanes,
) -> Result<Vec<RawAccumulator>> {
    if weights.rows != inputs.rows {
        return Err(BitsliceError::LengthMismatch {
            weights: weights.rows,
            inputs: inputs.rows,
        });
    }
    let mut acc = vec![0u64; weights.cols];
    for (t, plane) in inputs.planes.iter().enumerate() {
        for (s, cells) in weights.slices.iter().enumerate() {
            let shift = t as u32 + s as u32 * spec.cell_bits;
            for (col, a) in acc.iter_mut().enumerate() {
                let mut sum = 0u64;
                for (r, &bit) in plane.iter().enumerate() {
                    sum += (cells[r * weights.cols + col] & bit.wrapping_neg()) as u64;
                }
                *a += sum << shift;
            }
        }
    }
    Ok(acc.into_iter().map(RawAccumulator::new).collect())
}
