use xbar_bitslice::{pipeline_raw, BitsliceError, PipelineSpec, RawAccumulator};

use crate::{NumericsError, Result};

pub const MAX_LEVEL: u8 = 2;

const WORD_BITS: u32 = 16;

/// Low half, high half and their sum for every element of an operand vector.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct OperandGroups {
    pub low: Vec<u16>,
    pub high: Vec<u16>,
    pub sum: Vec<u16>,
    pub low_bits: u32,
    pub high_bits: u32,
    pub sum_bits: u32,
}

/// Crossbars and input iterations reserved for one operand group.
///
/// Groups in the same `phase` run concurrently; phases run back to back.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct GroupAlloc {
    pub crossbars: u32,
    pub iterations: u32,
    pub phase: u32,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct KaratsubaPlan {
    pub level: u8,
    pub weights: Vec<u16>,
    pub groups: OperandGroups,
    pub schedule: Vec<GroupAlloc>,
}

impl KaratsubaPlan {
    pub fn crossbar_alloc(&self) -> Vec<u32> {
        self.schedule.iter().map(|g| g.crossbars).collect()
    }

    pub fn iteration_alloc(&self) -> Vec<u32> {
        self.schedule.iter().map(|g| g.iterations).collect()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct DecompositionCost {
    /// Column conversions per 128-input dot-product window.
    pub adc_conversions: u32,
    /// Window length in crossbar cycles.
    pub iterations: u32,
    /// Crossbars added per 256-output IMA.
    pub extra_crossbars: u32,
    /// Digital adders forming the input half-sums.
    pub extra_adders: u32,
}

impl DecompositionCost {
    /// Fractional reduction in conversions relative to the plain pipeline.
    pub fn conversion_saving(&self) -> f64 {
        let base = karatsuba_cost(0).expect("level 0").adc_conversions as f64;
        1.0 - self.adc_conversions as f64 / base
    }
}

/// Splits `bits`-wide values at `bits / 2`.
pub fn split_operand(values: &[u16], bits: u32) -> OperandGroups {
    let h = bits / 2;
    let mask = (1u32 << h) - 1;
    let mut low = Vec::with_capacity(values.len());
    let mut high = Vec::with_capacity(values.len());
    let mut sum = Vec::with_capacity(values.len());
    for &v in values {
        let l = v as u32 & mask;
        let hi = v as u32 >> h;
        low.push(l as u16);
        high.push(hi as u16);
        sum.push((l + hi) as u16);
    }
    OperandGroups {
        low,
        high,
        sum,
        low_bits: h,
        high_bits: bits - h,
        sum_bits: h.max(bits - h) + 1,
    }
}

fn schedule(level: u8) -> Vec<GroupAlloc> {
    let g = |crossbars, iterations, phase| GroupAlloc {
        crossbars,
        iterations,
        phase,
    };
    match level {
        0 => vec![g(8, 16, 0)],
        // W0·X0 and W1·X1 side by side, then the 9-bit sum product.
        1 => vec![g(4, 8, 0), g(4, 8, 0), g(5, 9, 1)],
        // Second application: nibble products, then the wider sum products.
        _ => vec![g(8, 4, 0), g(6, 10, 1)],
    }
}

fn check_level(level: u8) -> Result<()> {
    if level > MAX_LEVEL {
        return Err(NumericsError::UnsupportedLevel(level));
    }
    Ok(())
}

/// Level-1 plan for a weight column.
pub fn karatsuba_split(weights: &[u16]) -> KaratsubaPlan {
    karatsuba_plan(weights, 1).expect("level 1 is always supported")
}

pub fn karatsuba_plan(weights: &[u16], level: u8) -> Result<KaratsubaPlan> {
    check_level(level)?;
    Ok(KaratsubaPlan {
        level,
        weights: weights.to_vec(),
        groups: split_operand(weights, WORD_BITS),
        schedule: schedule(level),
    })
}

/// Conversion and iteration counts of the hardware schedule for `level`.
pub fn karatsuba_cost(level: u8) -> Result<DecompositionCost> {
    check_level(level)?;
    let sched = schedule(level);
    let adc_conversions = sched.iter().map(|g| g.crossbars * g.iterations).sum();
    let phases = sched.iter().map(|g| g.phase).max().unwrap_or(0) + 1;
    let iterations = (0..phases)
        .map(|p| {
            sched
                .iter()
                .filter(|g| g.phase == p)
                .map(|g| g.iterations)
                .max()
                .unwrap_or(0)
        })
        .sum();
    let (extra_crossbars, extra_adders) = match level {
        0 => (0, 0),
        1 => (10, 128),
        _ => (24, 384),
    };
    Ok(DecompositionCost {
        adc_conversions,
        iterations,
        extra_crossbars,
        extra_adders,
    })
}

/// Cost of the literal recursive split that [`karatsuba_dot`] executes:
/// every leaf product of `w`-bit weights and `x`-bit inputs is charged
/// `ceil(w / 2)` slices times `x` iterations.
pub fn functional_cost(level: u8) -> Result<DecompositionCost> {
    check_level(level)?;
    fn conversions(bits: u32, depth: u8) -> u32 {
        if depth == 0 {
            return bits.div_ceil(2) * bits;
        }
        let h = bits / 2;
        let s = h.max(bits - h) + 1;
        conversions(h, depth - 1) + conversions(bits - h, depth - 1) + conversions(s, depth - 1)
    }
    fn iterations(bits: u32, depth: u8) -> u32 {
        if depth == 0 {
            return bits;
        }
        let h = bits / 2;
        let s = h.max(bits - h) + 1;
        iterations(h, depth - 1).max(iterations(bits - h, depth - 1)) + iterations(s, depth - 1)
    }
    let published = karatsuba_cost(level)?;
    Ok(DecompositionCost {
        adc_conversions: conversions(WORD_BITS, level),
        iterations: iterations(WORD_BITS, level),
        ..published
    })
}

fn leaf_dot(w: &[u16], x: &[u16], bits: u32) -> Result<u64> {
    let spec = PipelineSpec {
        weight_bits: bits,
        input_bits: bits,
        ..PipelineSpec::DEFAULT
    };
    Ok(pipeline_raw(&spec, w, x)?.value)
}

fn recursive_dot(w: &[u16], x: &[u16], bits: u32, depth: u8) -> Result<u64> {
    if depth == 0 || bits < 2 {
        return leaf_dot(w, x, bits);
    }
    let wg = split_operand(w, bits);
    let xg = split_operand(x, bits);
    let lo = recursive_dot(&wg.low, &xg.low, wg.low_bits, depth - 1)?;
    let hi = recursive_dot(&wg.high, &xg.high, wg.high_bits, depth - 1)?;
    let sum = recursive_dot(&wg.sum, &xg.sum, wg.sum_bits, depth - 1)?;
    let h = wg.low_bits;
    Ok((hi << (2 * h)) + ((sum - hi - lo) << h) + lo)
}

/// Dot product of the planned weights with `inputs`, computed from the
/// three half-width products (recursively for level 2), each of which runs
/// through the bit-sliced pipeline.
pub fn karatsuba_dot(plan: &KaratsubaPlan, inputs: &[u16]) -> Result<RawAccumulator> {
    check_level(plan.level)?;
    if plan.weights.len() != inputs.len() {
        return Err(BitsliceError::LengthMismatch {
            weights: plan.weights.len(),
            inputs: inputs.len(),
        }
        .into());
    }
    Ok(RawAccumulator::new(recursive_dot(
        &plan.weights,
        inputs,
        WORD_BITS,
        plan.level,
    )?))
}
