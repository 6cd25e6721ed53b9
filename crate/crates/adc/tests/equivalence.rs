use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use xbar_adc::*;
use xbar_bitslice::{pipeline_dot, PipelineSpec};

const REDUCED: PipelineSpec = PipelineSpec {
    weight_bits: 4,
    input_bits: 4,
    cell_bits: 2,
    max_rows: 8,
    max_cols: 8,
    drop_bits: 3,
    out_bits: 5,
};

/// Random 128-row cases whose magnitudes spread across the output window
/// instead of almost always saturating.
fn random_cases(seed: u64, n: usize) -> Vec<(Vec<u16>, Vec<u16>)> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
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

#[test]
fn exhaustive_search_finds_all_but_lowest_bit() {
    let s = search_exact_guard(&REDUCED, 2).unwrap();
    assert_eq!(s.cases, 1 << 16);
    assert_eq!(s.exact_guard, Some(REDUCED.drop_bits - 1));
    assert!(s.mismatches[..s.mismatches.len() - 1]
        .iter()
        .all(|&(_, m)| m > 0));
    assert_eq!(s.scaled_to(&PipelineSpec::DEFAULT), Some(9));
}

#[test]
fn reduced_random_eight_rows_at_exact_guard() {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let cases: Vec<_> = (0..20_000)
        .map(|_| {
            let w = (0..8).map(|_| rng.random_range(0..16)).collect();
            let x = (0..8).map(|_| rng.random_range(0..16)).collect();
            (w, x)
        })
        .collect();
    assert_eq!(count_mismatches(&REDUCED, 2, cases.clone()).unwrap(), 0);
    assert!(count_mismatches(&REDUCED, 1, cases.clone()).unwrap() > 0);
    assert!(count_mismatches(&REDUCED, 0, cases).unwrap() > 0);
}

#[test]
fn full_scale_random_at_exact_guard() {
    let cases = random_cases(42, 10_000);
    assert_eq!(
        count_mismatches(&PipelineSpec::DEFAULT, 9, cases).unwrap(),
        0
    );
}

#[test]
fn full_scale_zero_guard_is_inexact() {
    let cases = random_cases(43, 2_000);
    assert!(count_mismatches(&PipelineSpec::DEFAULT, 0, cases).unwrap() > 0);
    // 3·3 + 8·63 = 513 rounds up, but without bits 0..1 the kept sum is 508.
    let witness = vec![(vec![3, 8], vec![3, 63])];
    assert_eq!(
        count_mismatches(&PipelineSpec::DEFAULT, 8, witness.clone()).unwrap(),
        1
    );
    assert_eq!(
        count_mismatches(&PipelineSpec::DEFAULT, 9, witness).unwrap(),
        0
    );
}

proptest! {
    #[test]
    fn keeping_everything_is_identity(
        pairs in prop::collection::vec((any::<u16>(), any::<u16>()), 1..=128),
    ) {
        let (w, x): (Vec<u16>, Vec<u16>) = pairs.into_iter().unzip();
        let grid = derive_grid(10).unwrap();
        prop_assert_eq!(adaptive_pipeline_dot(&w, &x, &grid).unwrap(), pipeline_dot(&w, &x).unwrap());
    }

    #[test]
    fn truncation_never_overshoots(
        g in 0u32..=10,
        pairs in prop::collection::vec((any::<u16>(), any::<u16>()), 1..=128),
    ) {
        let (w, x): (Vec<u16>, Vec<u16>) = pairs.into_iter().unzip();
        let grid = derive_grid(g).unwrap();
        let out = adaptive_pipeline_run(&PipelineSpec::DEFAULT, &w, &x, &grid).unwrap();
        let exact = pipeline_dot(&w, &x).unwrap();
        prop_assert!(out.value.value <= exact.value || exact.value == 0xFFFF);
    }
}

#[test]
fn energy_summary() {
    let lin = AdcPowerModel::default();
    let bw = AdcPowerModel {
        cdac_model: CdacModel::BinaryWeighted,
        ..lin
    };
    for m in [lin, bw] {
        let a = relative_energy(&derive_grid(0).unwrap(), &m);
        let k = relative_energy(
            &derive_grid_for(&PipelineSpec::DEFAULT, &karatsuba_groups(1), Some(0)).unwrap(),
            &m,
        );
        println!(
            "{:?}: adaptive {a:.3}, karatsuba+adaptive {k:.3}",
            m.cdac_model
        );
        assert!(a < 0.85 && k < a);
    }
}
