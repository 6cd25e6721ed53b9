use std::collections::HashMap;
use std::sync::{Mutex, OnceLock};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use xbar_adc::{count_mismatches, exhaustive_cases, search_exact_guard};
use xbar_bitslice::{
    pipeline_dot, pipeline_dot_with, reference_dot, reference_dot_with, scale_round_clamp,
    scale_round_clamp_with, PipelineSpec,
};
use xbar_numerics::{karatsuba_dot, karatsuba_plan, strassen_multiply, Matrix};

use crate::{EvalError, Result, SCHEMA_VERSION};

type Case = (Vec<u16>, Vec<u16>);
type GateCache = Mutex<HashMap<(u8, bool, bool), bool>>;

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct SuiteResult {
    pub name: String,
    pub cases: u64,
    pub failures: u64,
}

impl SuiteResult {
    pub fn passed(&self) -> bool {
        self.failures == 0 && self.cases > 0
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct VerifyReport {
    pub schema_version: u32,
    pub seed: u64,
    /// Smallest adaptive-ADC guard that is exact at full width.
    pub exact_guard: Option<u32>,
    pub suites: Vec<SuiteResult>,
}

impl VerifyReport {
    pub fn passed(&self) -> bool {
        self.suites.iter().all(SuiteResult::passed)
    }

    pub fn failures(&self) -> u64 {
        self.suites.iter().map(|s| s.failures).sum()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct VerifyOptions {
    pub seed: u64,
    /// Random 128-row cases for the pipeline and adaptive-ADC suites.
    pub random_cases: usize,
    /// Random cases for each Karatsuba level and for Strassen.
    pub decomposition_cases: usize,
    /// Run the exhaustive small-configuration sweeps.
    pub exhaustive: bool,
}

impl Default for VerifyOptions {
    fn default() -> Self {
        VerifyOptions {
            seed: 42,
            random_cases: 10_000,
            decomposition_cases: 1_000,
            exhaustive: true,
        }
    }
}

/// Random 128-row cases whose products spread across the output window.
pub fn window_spanning_cases(rng: &mut ChaCha8Rng, n: usize) -> Vec<Case> {
    (0..n)
        .map(|_| {
            let total: u32 = rng.random_range(6..=24);
            let wb = rng.random_range(total.saturating_sub(16)..=total.min(16));
            let xb = (total - wb).min(16);
            let w = (0..128)
                .map(|_| rng.random_range(0..1u32 << wb) as u16)
                .collect();
            let x = (0..128)
                .map(|_| rng.random_range(0..1u32 << xb) as u16)
                .collect();
            (w, x)
        })
        .collect()
}

fn full_width_cases(rng: &mut ChaCha8Rng, n: usize) -> Vec<Case> {
    (0..n)
        .map(|_| {
            let rows = rng.random_range(1..=128);
            let w = (0..rows).map(|_| rng.random()).collect();
            let x = (0..rows).map(|_| rng.random()).collect();
            (w, x)
        })
        .collect()
}

fn count<T, F>(items: &[T], check: F) -> Result<u64>
where
    T: Sync,
    F: Fn(&T) -> Result<bool> + Sync,
{
    #[cfg(feature = "parallel")]
    {
        use rayon::prelude::*;
        items
            .par_iter()
            .map(|c| check(c).map(|ok| u64::from(!ok)))
            .try_reduce(|| 0, |a, b| Ok(a + b))
    }
    #[cfg(not(feature = "parallel"))]
    {
        items
            .iter()
            .map(|c| check(c).map(|ok| u64::from(!ok)))
            .sum()
    }
}

fn small_spec(bits: u32, rows: usize) -> PipelineSpec {
    PipelineSpec {
        weight_bits: bits,
        input_bits: bits,
        cell_bits: 2,
        max_rows: rows,
        max_cols: rows,
        drop_bits: bits.min(4),
        out_bits: bits,
    }
}

/// Reduced spec on which the guard search is exhaustive.
const GUARD_SEARCH_SPEC: PipelineSpec = PipelineSpec {
    weight_bits: 4,
    input_bits: 4,
    cell_bits: 2,
    max_rows: 8,
    max_cols: 8,
    drop_bits: 3,
    out_bits: 5,
};

/// Exact guard for the full-width pipeline, found by exhaustive search on a
/// reduced spec and scaled up. Computed once per process.
pub fn exact_guard() -> Result<Option<u32>> {
    static GUARD: OnceLock<Option<u32>> = OnceLock::new();
    if let Some(g) = GUARD.get() {
        return Ok(*g);
    }
    let g = search_exact_guard(&GUARD_SEARCH_SPEC, 2)?.scaled_to(&PipelineSpec::DEFAULT);
    Ok(*GUARD.get_or_init(|| g))
}

fn pipeline_random(cases: &[Case]) -> Result<u64> {
    count(cases, |(w, x)| {
        Ok(pipeline_dot(w, x)? == scale_round_clamp(reference_dot(w, x)?))
    })
}

fn karatsuba_random(level: u8, cases: &[Case]) -> Result<u64> {
    count(cases, |(w, x)| {
        let plan = karatsuba_plan(w, level)?;
        Ok(karatsuba_dot(&plan, x)? == reference_dot(w, x)?)
    })
}

fn random_matrix_pairs(rng: &mut ChaCha8Rng, n: usize) -> Vec<(Matrix, Matrix)> {
    (0..n)
        .map(|_| {
            let (r, k, c) = (
                2 * rng.random_range(1..=8),
                2 * rng.random_range(1..=8),
                2 * rng.random_range(1..=8),
            );
            let mut m = |rows: usize, cols: usize| Matrix {
                rows,
                cols,
                data: (0..rows * cols)
                    .map(|_| rng.random_range(-(1i64 << 15)..1i64 << 15))
                    .collect(),
            };
            let x = m(r, k);
            let w = m(k, c);
            (x, w)
        })
        .collect()
}

fn strassen_random(pairs: &[(Matrix, Matrix)]) -> Result<u64> {
    count(pairs, |(x, w)| {
        Ok(strassen_multiply(x, w)? == x.multiply(w)?)
    })
}

fn adaptive_random(guard: u32, cases: &[Case]) -> Result<u64> {
    #[cfg(feature = "parallel")]
    {
        use rayon::prelude::*;
        cases
            .par_chunks(256)
            .map(|chunk| {
                Ok(count_mismatches(
                    &PipelineSpec::DEFAULT,
                    guard,
                    chunk.to_vec(),
                )?)
            })
            .try_reduce(|| 0, |a, b| Ok(a + b))
    }
    #[cfg(not(feature = "parallel"))]
    {
        Ok(count_mismatches(
            &PipelineSpec::DEFAULT,
            guard,
            cases.to_vec(),
        )?)
    }
}

fn suite(name: &str, cases: usize, failures: u64) -> SuiteResult {
    SuiteResult {
        name: name.to_string(),
        cases: cases as u64,
        failures,
    }
}

/// Runs every oracle-equivalence suite. Output depends only on `opts`.
pub fn run_verification(opts: &VerifyOptions) -> Result<VerifyReport> {
    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
    let mut suites = Vec::new();
    if opts.exhaustive {
        for (bits, rows) in [(6, 1), (5, 2), (3, 3), (2, 4)] {
            let spec = small_spec(bits, rows);
            let cases: Vec<Case> = exhaustive_cases(&spec, rows).collect();
            let bad = count(&cases, |(w, x)| {
                Ok(pipeline_dot_with(&spec, w, x)?
                    == scale_round_clamp_with(&spec, reference_dot_with(&spec, w, x)?))
            })?;
            suites.push(suite(
                &format!("pipeline_exhaustive_{bits}bit_{rows}rows"),
                cases.len(),
                bad,
            ));
        }
    }
    let spanning = window_spanning_cases(&mut rng, opts.random_cases);
    suites.push(suite(
        "pipeline_random",
        spanning.len(),
        pipeline_random(&spanning)?,
    ));

    let wide = full_width_cases(&mut rng, opts.decomposition_cases);
    for level in 1..=2u8 {
        suites.push(suite(
            &format!("karatsuba_level{level}"),
            wide.len(),
            karatsuba_random(level, &wide)?,
        ));
    }
    let pairs = random_matrix_pairs(&mut rng, opts.decomposition_cases);
    suites.push(suite("strassen", pairs.len(), strassen_random(&pairs)?));

    let guard = exact_guard()?;
    suites.push(suite(
        "adaptive_guard_search",
        1,
        u64::from(guard.is_none()),
    ));
    let adaptive = window_spanning_cases(&mut rng, opts.random_cases);
    let bad = match guard {
        Some(g) => adaptive_random(g, &adaptive)?,
        None => adaptive.len() as u64,
    };
    suites.push(suite("adaptive_at_exact_guard", adaptive.len(), bad));

    Ok(VerifyReport {
        schema_version: SCHEMA_VERSION,
        seed: opts.seed,
        exact_guard: guard,
        suites,
    })
}

/// Quick equivalence check of the numeric path a design point relies on,
/// cached per distinct path.
pub(crate) fn numerics_gate(karatsuba_level: u8, strassen: bool, adaptive: bool) -> Result<()> {
    static CACHE: OnceLock<GateCache> = OnceLock::new();
    let key = (karatsuba_level, strassen, adaptive);
    let cache = CACHE.get_or_init(|| Mutex::new(HashMap::new()));
    if let Some(&ok) = cache.lock().expect("gate cache").get(&key) {
        return if ok { Ok(()) } else { Err(gate_error(key)) };
    }
    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed);
    let cases = window_spanning_cases(&mut rng, 64);
    let mut bad = pipeline_random(&cases)?;
    if karatsuba_level > 0 {
        bad += karatsuba_random(karatsuba_level, &full_width_cases(&mut rng, 64))?;
    }
    if strassen {
        bad += strassen_random(&random_matrix_pairs(&mut rng, 16))?;
    }
    if adaptive {
        bad += match exact_guard()? {
            Some(g) => adaptive_random(g, &cases)?,
            None => 1,
        };
    }
    cache.lock().expect("gate cache").insert(key, bad == 0);
    if bad == 0 {
        Ok(())
    } else {
        Err(gate_error(key))
    }
}

fn gate_error((level, strassen, adaptive): (u8, bool, bool)) -> EvalError {
    EvalError::NumericsGate(format!(
        "karatsuba level {level}, strassen {strassen}, adaptive ADC {adaptive}"
    ))
}
