use xbar_bitslice::PipelineSpec;

use crate::{AdcError, Result};

/// A block of `slices` weight-slice columns streamed for `iterations` input
/// bits; sample (c, t) lands at global bit `shift + cell_bits·c + t`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SliceGroup {
    pub slices: u32,
    pub iterations: u32,
    pub shift: u32,
}

const fn group(slices: u32, iterations: u32, shift: u32) -> SliceGroup {
    SliceGroup {
        slices,
        iterations,
        shift,
    }
}

/// Slice groups of the Karatsuba schedule at `level` (level 0 is the plain
/// 8×16 pipeline). Levels above 2 fall back to level 2.
pub fn karatsuba_groups(level: u8) -> Vec<SliceGroup> {
    match level {
        0 => vec![group(8, 16, 0)],
        1 => vec![group(4, 8, 0), group(4, 8, 16), group(5, 9, 8)],
        _ => vec![
            group(2, 4, 0),
            group(2, 4, 8),
            group(2, 4, 16),
            group(2, 4, 24),
            group(3, 5, 4),
            group(3, 5, 20),
            group(3, 5, 8),
            group(3, 5, 12),
        ],
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct AdcCell {
    pub group: u16,
    pub column: u8,
    pub iteration: u8,
    /// Global bit position of sample bit 0.
    pub shift: u32,
    /// Global bit position of the lowest resolved bit.
    pub start_bit: u32,
    pub kept_bits: u32,
    pub clamp_test: bool,
}

impl AdcCell {
    /// Comparator decisions needed for this cell: kept bits plus one
    /// overflow test when the sample reaches into the clamp zone.
    pub fn resolved_bits(&self) -> u32 {
        self.kept_bits + self.clamp_test as u32
    }

    /// Splits the sample's bits into (below window, kept, above kept range).
    pub fn zones(&self, sample_bits: u32) -> (u32, u32, u32) {
        let below = if self.kept_bits == 0 {
            // Nothing kept: either the whole sample is below or above.
            if self.clamp_test {
                0
            } else {
                sample_bits
            }
        } else {
            self.start_bit - self.shift
        };
        (below, self.kept_bits, sample_bits - below - self.kept_bits)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AdcGrid {
    pub sample_bits: u32,
    pub cell_bits: u32,
    pub window_low: u32,
    pub window_high: u32,
    /// `None` means every sample is converted at full resolution.
    pub guard_bits: Option<u32>,
    pub groups: Vec<SliceGroup>,
    pub cells: Vec<AdcCell>,
}

impl AdcGrid {
    /// Cell of the first group at (column, iteration).
    pub fn cell(&self, column: usize, iteration: usize) -> &AdcCell {
        let g = &self.groups[0];
        assert!(column < g.slices as usize && iteration < g.iterations as usize);
        &self.cells[column * g.iterations as usize + iteration]
    }

    pub fn total_kept_bits(&self) -> u32 {
        self.cells.iter().map(|c| c.kept_bits).sum()
    }

    pub fn total_resolved_bits(&self) -> u32 {
        self.cells.iter().map(|c| c.resolved_bits()).sum()
    }

    pub fn conversions(&self) -> usize {
        self.cells.len()
    }

    pub fn is_adaptive(&self) -> bool {
        self.guard_bits.is_some()
    }
}

/// Grid for the default 16-bit pipeline with `guard_bits` extra bits kept
/// below the output window.
pub fn derive_grid(guard_bits: u32) -> Result<AdcGrid> {
    derive_grid_for(
        &PipelineSpec::DEFAULT,
        &karatsuba_groups(0),
        Some(guard_bits),
    )
}

/// Non-adaptive grid for the given Karatsuba level.
pub fn full_grid(level: u8) -> AdcGrid {
    derive_grid_for(&PipelineSpec::DEFAULT, &karatsuba_groups(level), None)
        .expect("full grids are always valid")
}

pub fn derive_grid_for(
    spec: &PipelineSpec,
    groups: &[SliceGroup],
    guard_bits: Option<u32>,
) -> Result<AdcGrid> {
    spec.validate()?;
    let window_low = spec.drop_bits;
    let window_high = spec.clamp_bit() - 1;
    if let Some(g) = guard_bits {
        if g > window_low {
            return Err(AdcError::GuardTooLarge {
                guard: g,
                limit: window_low,
            });
        }
    }
    let sb = spec.sample_bits();
    let mut cells = Vec::new();
    for (gi, grp) in groups.iter().enumerate() {
        for c in 0..grp.slices {
            for t in 0..grp.iterations {
                let shift = grp.shift + spec.cell_bits * c + t;
                let top = shift + sb - 1;
                let (start_bit, kept_bits, clamp_test) = match guard_bits {
                    None => (shift, sb, false),
                    Some(g) => {
                        let lo = shift.max(window_low - g);
                        let hi = top.min(window_high);
                        let kept = if hi >= lo { hi - lo + 1 } else { 0 };
                        (lo.min(window_high + 1), kept, top > window_high)
                    }
                };
                cells.push(AdcCell {
                    group: gi as u16,
                    column: c as u8,
                    iteration: t as u8,
                    shift,
                    start_bit,
                    kept_bits,
                    clamp_test,
                });
            }
        }
    }
    Ok(AdcGrid {
        sample_bits: sb,
        cell_bits: spec.cell_bits,
        window_low,
        window_high,
        guard_bits,
        groups: groups.to_vec(),
        cells,
    })
}

/// Largest number of full-resolution conversions in any single iteration.
pub fn max_full_resolution_per_iteration(grid: &AdcGrid) -> usize {
    let mut counts = std::collections::HashMap::new();
    for cell in grid
        .cells
        .iter()
        .filter(|c| c.kept_bits == grid.sample_bits)
    {
        *counts.entry((cell.group, cell.iteration)).or_insert(0usize) += 1;
    }
    counts.into_values().max().unwrap_or(0)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn corner_cells() {
        let g = derive_grid(0).unwrap();
        let c = g.cell(7, 15);
        assert_eq!((c.shift, c.kept_bits, c.clamp_test), (29, 0, true));
        let c = g.cell(0, 0);
        assert_eq!((c.shift, c.kept_bits, c.clamp_test), (0, 0, false));
        let c = g.cell(5, 2);
        assert_eq!((c.shift, c.kept_bits, c.clamp_test), (12, 9, false));
    }

    #[test]
    fn full_resolution_counts() {
        assert_eq!(
            max_full_resolution_per_iteration(&derive_grid(0).unwrap()),
            4
        );
        assert_eq!(
            max_full_resolution_per_iteration(&derive_grid(10).unwrap()),
            8
        );
        let narrow = PipelineSpec {
            out_bits: 4,
            ..PipelineSpec::DEFAULT
        };
        let g = derive_grid_for(&narrow, &karatsuba_groups(0), Some(0)).unwrap();
        assert_eq!(max_full_resolution_per_iteration(&g), 0);
    }

    #[test]
    fn zones_cover_the_sample() {
        for guard in 0..=10 {
            let g = derive_grid(guard).unwrap();
            for c in &g.cells {
                let (lo, kept, hi) = c.zones(g.sample_bits);
                assert_eq!(lo + kept + hi, 9);
                if c.kept_bits > 0 {
                    assert!(c.start_bit >= g.window_low - guard);
                    assert!(c.start_bit + c.kept_bits - 1 <= g.window_high);
                }
                assert_eq!(hi > 0, c.clamp_test);
            }
        }
        assert!(derive_grid(11).is_err());
    }

    #[test]
    fn zero_guard_saves_bits() {
        let g = derive_grid(0).unwrap();
        assert!(g.total_kept_bits() < 128 * 9);
        assert_eq!(g.conversions(), 128);
    }

    #[test]
    fn group_conversion_totals() {
        let n: Vec<usize> = (0..=2).map(|l| full_grid(l).conversions()).collect();
        assert_eq!(n, vec![128, 109, 92]);
    }
}
