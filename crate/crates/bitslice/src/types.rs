/// 16-bit fixed-point output of a dot product.
///
/// `scale_exp` records the power-of-two weight of the least significant bit
/// relative to the raw accumulator; it is metadata only.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Fixed16 {
    pub value: u16,
    pub scale_exp: i32,
}

/// Exact unsigned dot-product accumulator (at most 39 bits by default).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct RawAccumulator {
    pub value: u64,
}

impl RawAccumulator {
    pub fn new(value: u64) -> Self {
        Self { value }
    }
}

impl From<u64> for RawAccumulator {
    fn from(value: u64) -> Self {
        Self { value }
    }
}

/// Weights cut into `cell_bits`-wide slices; slice `s` holds bits
/// `[s*cell_bits, (s+1)*cell_bits)` of every weight.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SlicedWeightMatrix {
    pub rows: usize,
    pub cols: usize,
    pub cell_bits: u32,
    /// One row-major `rows × cols` plane of cells per slice, LSB slice first.
    pub slices: Vec<Vec<u8>>,
}

impl SlicedWeightMatrix {
    pub fn cell(&self, slice: usize, row: usize, col: usize) -> u8 {
        self.slices[slice][row * self.cols + col]
    }

    /// Column `col` of slice `slice`, top to bottom.
    pub fn column(&self, slice: usize, col: usize) -> Vec<u8> {
        (0..self.rows).map(|r| self.cell(slice, r, col)).collect()
    }

    /// Rebuilds the original weights (row-major).
    pub fn reconstruct(&self) -> Vec<u16> {
        let mut out = vec![0u32; self.rows * self.cols];
        for (s, plane) in self.slices.iter().enumerate() {
            let shift = s as u32 * self.cell_bits;
            for (o, &c) in out.iter_mut().zip(plane) {
                *o |= (c as u32) << shift;
            }
        }
        out.into_iter().map(|v| v as u16).collect()
    }
}

/// Inputs split into 1-bit planes; plane `t` holds bit `t` of every input.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct InputBitPlanes {
    pub rows: usize,
    pub planes: Vec<Vec<u8>>,
}

impl InputBitPlanes {
    pub fn reconstruct(&self) -> Vec<u16> {
        let mut out = vec![0u32; self.rows];
        for (t, plane) in self.planes.iter().enumerate() {
            for (o, &b) in out.iter_mut().zip(plane) {
                *o |= (b as u32) << t;
            }
        }
        out.into_iter().map(|v| v as u16).collect()
    }
}

/// Digitised output of one crossbar column in one iteration.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct ColumnSample {
    pub value: u32,
    pub column_slice: u8,
    pub iteration: u8,
}
