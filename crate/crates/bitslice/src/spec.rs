use crate::{BitsliceError, Result};

/// Widths and sizes of one crossbar pipeline.
///
/// [`PipelineSpec::DEFAULT`] is the 16-bit design point: 128×128 crossbars,
/// 2-bit cells, 1-bit inputs, 10 dropped LSBs and a 16-bit output. Reduced
/// specs exist so that properties can be checked exhaustively.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct PipelineSpec {
    pub weight_bits: u32,
    pub input_bits: u32,
    pub cell_bits: u32,
    pub max_rows: usize,
    pub max_cols: usize,
    pub drop_bits: u32,
    pub out_bits: u32,
}

impl Default for PipelineSpec {
    fn default() -> Self {
        Self::DEFAULT
    }
}

impl PipelineSpec {
    pub const DEFAULT: PipelineSpec = PipelineSpec {
        weight_bits: 16,
        input_bits: 16,
        cell_bits: 2,
        max_rows: 128,
        max_cols: 128,
        drop_bits: 10,
        out_bits: 16,
    };

    pub fn validate(&self) -> Result<()> {
        let bad = |m: &str| Err(BitsliceError::Spec(m.to_string()));
        if self.weight_bits == 0 || self.weight_bits > 16 {
            return bad("weight_bits must be in 1..=16");
        }
        if self.input_bits == 0 || self.input_bits > 16 {
            return bad("input_bits must be in 1..=16");
        }
        if self.cell_bits == 0 || self.cell_bits > 4 {
            return bad("cell_bits must be in 1..=4");
        }
        if self.max_rows == 0 || self.max_cols == 0 {
            return bad("crossbar dimensions must be positive");
        }
        if self.out_bits == 0 || self.out_bits > 16 {
            return bad("out_bits must be in 1..=16");
        }
        if self.clamp_bit() > 63 || self.accumulator_bits() > 63 {
            return bad("accumulator wider than 63 bits");
        }
        Ok(())
    }

    /// Number of weight slices (crossbars per weight column).
    pub fn slices(&self) -> u32 {
        self.weight_bits.div_ceil(self.cell_bits)
    }

    /// Number of input bit planes (iterations per window).
    pub fn planes(&self) -> u32 {
        self.input_bits
    }

    pub fn cell_max(&self) -> u32 {
        (1 << self.cell_bits) - 1
    }

    /// Largest possible column sample with every row active.
    pub fn max_sample(&self) -> u64 {
        self.max_rows as u64 * self.cell_max() as u64
    }

    /// Bits needed to hold a column sample (9 for the default spec).
    pub fn sample_bits(&self) -> u32 {
        bits_for(self.max_sample())
    }

    /// Width of one iteration's shift-added partial (23 for the default spec).
    pub fn column_bits(&self) -> u32 {
        self.sample_bits() + self.cell_bits * (self.slices() - 1)
    }

    /// Width of the full accumulator (39 for the default spec).
    pub fn accumulator_bits(&self) -> u32 {
        self.column_bits() + self.planes()
    }

    /// Lowest accumulator bit whose presence after rounding saturates the output.
    pub fn clamp_bit(&self) -> u32 {
        self.drop_bits + self.out_bits
    }

    pub fn out_max(&self) -> u16 {
        ((1u32 << self.out_bits) - 1) as u16
    }
}

/// Number of bits needed to represent `v` (at least 1).
pub(crate) fn bits_for(v: u64) -> u32 {
    (64 - v.leading_zeros()).max(1)
}
