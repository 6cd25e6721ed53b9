use proptest::prelude::*;
use xbar_bitslice::*;

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

/// Enumerates every (weights, inputs) pair of `rows` values of `bits` bits.
fn exhaustive(bits: u32, rows: usize) -> u64 {
    let spec = small_spec(bits, rows);
    let per = 1u64 << bits;
    let total = per.pow(2 * rows as u32);
    let mut w = vec![0u16; rows];
    let mut x = vec![0u16; rows];
    let mut mismatches = 0;
    for code in 0..total {
        let mut c = code;
        for i in 0..rows {
            w[i] = (c % per) as u16;
            c /= per;
            x[i] = (c % per) as u16;
            c /= per;
        }
        let want = scale_round_clamp_with(&spec, reference_dot_with(&spec, &w, &x).unwrap());
        if pipeline_dot_with(&spec, &w, &x).unwrap() != want {
            mismatches += 1;
        }
    }
    mismatches
}

#[test]
fn exhaustive_small_configs_match_oracle() {
    for (bits, rows) in [(6, 1), (5, 2), (3, 3), (2, 4)] {
        assert_eq!(exhaustive(bits, rows), 0, "{bits}-bit, {rows} rows");
    }
}

#[test]
fn analytic_maxima_fit_their_widths() {
    let spec = PipelineSpec::DEFAULT;
    let sample = crossbar_column_mac(&[3; 128], &[1; 128]);
    assert_eq!(sample, 384);
    assert!((sample as u64) < 1 << spec.sample_bits());
    let iter: Vec<ColumnSample> = (0..8)
        .map(|s| ColumnSample {
            value: sample,
            column_slice: s,
            iteration: 0,
        })
        .collect();
    let partial = shift_add_columns(&iter);
    assert!(partial < 1 << spec.column_bits());
    let acc = shift_add_iterations(&[partial; 16]);
    assert!(acc.value < 1 << spec.accumulator_bits());
    assert_eq!(spec.accumulator_bits(), 39);
}

#[test]
fn drop_and_clamp_zones() {
    // anything in bits 0..=9 alone rounds to at most 1
    assert_eq!(
        scale_round_clamp(RawAccumulator::new((1 << 10) - 1)).value,
        1
    );
    assert_eq!(
        scale_round_clamp(RawAccumulator::new((1 << 9) - 1)).value,
        0
    );
    for bit in 26..39 {
        assert_eq!(
            scale_round_clamp(RawAccumulator::new(1 << bit)).value,
            0xFFFF
        );
    }
    assert_eq!(
        scale_round_clamp(RawAccumulator::new(1 << 25)).value,
        1 << 15
    );
}

fn vec_pair(max_len: usize) -> impl Strategy<Value = (Vec<u16>, Vec<u16>)> {
    (1..=max_len).prop_flat_map(|n| {
        (
            prop::collection::vec(any::<u16>(), n),
            prop::collection::vec(any::<u16>(), n),
        )
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(512))]

    #[test]
    fn weight_slices_round_trip(w in prop::collection::vec(any::<u16>(), 1..=128)) {
        let s = slice_weights(&w).unwrap();
        prop_assert!(s.slices.iter().flatten().all(|&c| c < 4));
        prop_assert_eq!(s.reconstruct(), w);
    }

    #[test]
    fn input_planes_round_trip(x in prop::collection::vec(any::<u16>(), 1..=128)) {
        let p = plane_inputs(&x).unwrap();
        prop_assert_eq!(p.planes.len(), 16);
        prop_assert_eq!(p.reconstruct(), x);
    }

    #[test]
    fn pipeline_equals_oracle((w, x) in vec_pair(128)) {
        let want = scale_round_clamp(reference_dot(&w, &x).unwrap());
        prop_assert_eq!(pipeline_dot(&w, &x).unwrap(), want);
        prop_assert_eq!(
            pipeline_raw(&PipelineSpec::DEFAULT, &w, &x).unwrap(),
            reference_dot(&w, &x).unwrap()
        );
    }

    #[test]
    fn scaling_is_monotone(a in 0u64..(1 << 39), b in 0u64..(1 << 39)) {
        let (lo, hi) = if a <= b { (a, b) } else { (b, a) };
        prop_assert!(
            scale_round_clamp(RawAccumulator::new(lo)).value
                <= scale_round_clamp(RawAccumulator::new(hi)).value
        );
    }

    #[test]
    fn samples_stay_within_nine_bits((w, x) in vec_pair(128)) {
        let samples = column_samples(&PipelineSpec::DEFAULT, &w, &x).unwrap();
        prop_assert_eq!(samples.len(), 128);
        prop_assert!(samples.iter().all(|s| s.value <= 3 * w.len() as u32));
    }
}
