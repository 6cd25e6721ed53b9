use xbar_bitslice::{pipeline_dot_with, PipelineSpec};

use crate::{adaptive_pipeline_dot_with, derive_grid_for, Result, SliceGroup};

/// Every (weights, inputs) pair of `rows` values within the spec's widths,
/// weights and inputs interleaved as base-2^bits digits of a counter.
pub fn exhaustive_cases(
    spec: &PipelineSpec,
    rows: usize,
) -> impl Iterator<Item = (Vec<u16>, Vec<u16>)> {
    let wb = spec.weight_bits;
    let xb = spec.input_bits;
    let total_bits = rows as u32 * (wb + xb);
    assert!(total_bits < 64, "exhaustive space too large");
    (0..1u64 << total_bits).map(move |mut code| {
        let mut w = Vec::with_capacity(rows);
        let mut x = Vec::with_capacity(rows);
        for _ in 0..rows {
            w.push((code & ((1 << wb) - 1)) as u16);
            code >>= wb;
            x.push((code & ((1 << xb) - 1)) as u16);
            code >>= xb;
        }
        (w, x)
    })
}

fn plain_group(spec: &PipelineSpec) -> [SliceGroup; 1] {
    [SliceGroup {
        slices: spec.slices(),
        iterations: spec.planes(),
        shift: 0,
    }]
}

/// Number of cases where the adaptive pipeline with `guard` differs from the
/// full-precision pipeline.
pub fn count_mismatches<I>(spec: &PipelineSpec, guard: u32, cases: I) -> Result<u64>
where
    I: IntoIterator<Item = (Vec<u16>, Vec<u16>)>,
{
    let grid = derive_grid_for(spec, &plain_group(spec), Some(guard))?;
    let mut bad = 0;
    for (w, x) in cases {
        if adaptive_pipeline_dot_with(spec, &w, &x, &grid)? != pipeline_dot_with(spec, &w, &x)? {
            bad += 1;
        }
    }
    Ok(bad)
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GuardSearch {
    pub spec: PipelineSpec,
    pub rows: usize,
    pub cases: u64,
    /// Mismatch count for each guard value tried, in increasing order.
    pub mismatches: Vec<(u32, u64)>,
    /// Smallest guard with zero mismatches.
    pub exact_guard: Option<u32>,
}

impl GuardSearch {
    /// The exact guard expressed as a fraction of the dropped bits, which
    /// carries over from a reduced spec to the full-width one.
    pub fn scaled_to(&self, target: &PipelineSpec) -> Option<u32> {
        let g = self.exact_guard?;
        if g == self.spec.drop_bits {
            Some(target.drop_bits)
        } else {
            Some(target.drop_bits - (self.spec.drop_bits - g))
        }
    }
}

/// Sweeps the guard upward from 0 over every input of a reduced spec and
/// returns the first guard that reproduces the full-precision result.
pub fn search_exact_guard(spec: &PipelineSpec, rows: usize) -> Result<GuardSearch> {
    spec.validate()?;
    let cases = 1u64 << (rows as u32 * (spec.weight_bits + spec.input_bits));
    let mut mismatches = Vec::new();
    let mut exact_guard = None;
    for g in 0..=spec.drop_bits {
        let bad = count_mismatches(spec, g, exhaustive_cases(spec, rows))?;
        mismatches.push((g, bad));
        if bad == 0 {
            exact_guard = Some(g);
            break;
        }
    }
    Ok(GuardSearch {
        spec: *spec,
        rows,
        cases,
        mismatches,
        exact_guard,
    })
}
