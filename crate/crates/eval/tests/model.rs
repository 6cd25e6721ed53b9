use proptest::prelude::*;
use xbar_arch::Component;
use xbar_eval::*;
use xbar_mapper::{plan_network, LayerDesc, NetworkDesc};
use xbar_workloads::{benchmark, suite};

fn tiny() -> NetworkDesc {
    NetworkDesc::chained("tiny", (8, 8, 8), vec![LayerDesc::conv(3, 3, 32, 1)]).unwrap()
}

#[test]
fn single_ima_latency_is_steps_times_window() {
    let net = tiny();
    for point in [DesignPoint::baseline(), DesignPoint::newton()] {
        let r = evaluate(&net, &point).unwrap();
        assert_eq!(r.conv_imas, 1);
        assert_eq!(r.latency_s, 64.0 * r.window_s);
        assert_eq!(r.pipeline_interval_s, 64.0 * r.window_s);
    }
}

#[test]
fn karatsuba_stretches_window_and_cuts_adc_energy() {
    let net = benchmark("vgg-a").unwrap();
    let base = DesignPoint::baseline();
    let k1 = base.with("karatsuba_level", "1").unwrap();
    let plan = plan_network(&net, &base.arch).unwrap();
    let a = simulate(&plan, &base, &net).unwrap();
    let b = simulate(&plan, &k1, &net).unwrap();
    assert!((b.window_s / a.window_s - 17.0 / 16.0).abs() < 1e-12);
    let ratio = b.energy_j.get(Component::Adc) / a.energy_j.get(Component::Adc);
    assert!((ratio - 109.0 / 128.0).abs() < 1e-9, "{ratio}");
}

#[test]
fn identical_points_have_zero_deltas() {
    let nets = vec![benchmark("alexnet").unwrap(), tiny()];
    let p = DesignPoint::newton();
    let c = compare(&p, &p, &nets).unwrap();
    for d in c.networks.iter().chain([&c.mean]) {
        assert_eq!(d.power_reduction, 0.0);
        assert_eq!(d.energy_efficiency_gain, 0.0);
        assert_eq!(d.throughput_per_area_ratio, 1.0);
        assert_eq!(d.area_reduction, 0.0);
    }
}

#[test]
fn singleton_grid_equals_simulate() {
    let nets = vec![benchmark("vgg-a").unwrap()];
    let base = DesignPoint::baseline();
    let grid = SweepGrid::new().axis("fc_tiles", &["true"]);
    let s = sweep(&base, &grid, &nets).unwrap();
    assert_eq!(s.points.len(), 1);
    let direct = evaluate(&nets[0], &base.with("fc_tiles", "true").unwrap()).unwrap();
    assert_eq!(s.points[0].reports[0], direct);
    assert_eq!(s.pareto_front, vec![0]);
}

#[test]
fn sweep_is_order_stable_and_execution_independent() {
    let nets = vec![
        benchmark("alexnet").unwrap(),
        benchmark("resnet-34").unwrap(),
    ];
    let grid = SweepGrid::new()
        .axis("fc_slowdown", &["8", "32", "128"])
        .axis("compact_htree", &["false", "true"]);
    let base = DesignPoint::newton();
    let par = sweep_with(&base, &grid, &nets, Execution::Parallel).unwrap();
    let seq = sweep_with(&base, &grid, &nets, Execution::Sequential).unwrap();
    assert_eq!(to_json(&par).unwrap(), to_json(&seq).unwrap());
    let labels: Vec<_> = par.points.iter().map(|p| p.settings.clone()).collect();
    assert_eq!(labels, grid.combinations());
    let front = &par.pareto_front;
    assert!(!front.is_empty());
    for &i in front {
        let p = &par.points[i];
        assert!(
            par.points
                .iter()
                .all(|q| !(q.ce_gops_per_mm2 > p.ce_gops_per_mm2
                    && q.pe_gops_per_w > p.pe_gops_per_w))
        );
    }
}

#[test]
fn power_is_lowest_at_slowest_fc_adcs() {
    let nets = suite().unwrap();
    let grid = SweepGrid::new().axis("fc_slowdown", &["8", "32", "128"]);
    let s = sweep(&DesignPoint::newton(), &grid, &nets).unwrap();
    let p: Vec<f64> = s.points.iter().map(|p| p.peak_power_w).collect();
    assert!(p[0] > p[1] && p[1] > p[2], "{p:?}");
}

#[test]
fn suite_invariants_hold() {
    let nets = suite().unwrap();
    for point in [DesignPoint::baseline(), DesignPoint::newton()] {
        for r in evaluate_suite(&point, &nets).unwrap() {
            let ops_s = r.ops_per_image * r.throughput_images_per_s;
            assert!(
                (r.ce_gops_per_mm2 - ops_s * 1e-9 / r.area_mm2).abs() < 1e-9 * r.ce_gops_per_mm2
            );
            assert!(
                (r.pe_gops_per_w - ops_s * 1e-9 / r.peak_power_w).abs() < 1e-9 * r.pe_gops_per_w
            );
            assert!(
                r.average_power_w() <= r.peak_power_w,
                "{}: {} > {}",
                r.network,
                r.average_power_w(),
                r.peak_power_w
            );
            assert!((r.energy_j.total() - r.energy_per_image_j).abs() < 1e-15);
            if r.toggles.spread_buffers {
                assert_eq!(r.edram_overflow_tiles, 0, "{}", r.network);
            }
            assert!(
                r.binding_constraint.starts_with("pipeline"),
                "{}",
                r.binding_constraint
            );
        }
    }
}

#[test]
fn every_optimization_has_a_cost_or_benefit() {
    let nets = vec![benchmark("vgg-a").unwrap(), benchmark("resnet-34").unwrap()];
    let on = DesignPoint::newton();
    for (key, off) in [
        ("compact_htree", "false"),
        ("adaptive_adc", "false"),
        ("karatsuba_level", "0"),
        ("spread_buffers", "false"),
        ("fc_tiles", "false"),
        ("strassen", "false"),
    ] {
        let c = compare(&on, &on.with(key, off).unwrap(), &nets).unwrap();
        let d = &c.mean;
        let all_better = d.power_reduction > 0.0
            && d.energy_efficiency_gain > 0.0
            && d.area_efficiency_gain > 0.0
            && d.latency_ratio < 1.0;
        assert!(!all_better, "turning off {key} improved everything: {d:?}");
        assert!(
            d.power_reduction != 0.0 || d.energy_efficiency_gain != 0.0 || d.area_reduction != 0.0,
            "{key} has no effect"
        );
    }
}

#[test]
fn strassen_frees_one_in_eight() {
    let nets = suite().unwrap();
    let p = DesignPoint::newton();
    for r in evaluate_suite(&p, &nets).unwrap() {
        assert_eq!(r.strassen_covered_imas, 8 * r.strassen_freed_imas);
    }
}

#[test]
fn guard_below_exact_is_flagged() {
    let net = tiny();
    let p = DesignPoint::newton();
    assert!(!evaluate(&net, &p).unwrap().exact_numerics);
    assert!(
        evaluate(&net, &p.with("guard_bits", "9").unwrap())
            .unwrap()
            .exact_numerics
    );
    assert!(
        evaluate(&net, &DesignPoint::baseline())
            .unwrap()
            .exact_numerics
    );
}

#[test]
fn mismatched_plan_and_empty_suite_are_errors() {
    let net = tiny();
    let other = benchmark("alexnet").unwrap();
    let p = DesignPoint::baseline();
    let plan = plan_network(&other, &p.arch).unwrap();
    assert!(matches!(
        simulate(&plan, &p, &net),
        Err(EvalError::PlanMismatch { .. })
    ));
    assert!(matches!(compare(&p, &p, &[]), Err(EvalError::EmptySuite)));
    assert!(matches!(
        sweep(&p, &SweepGrid::new().axis("x", &[]), &[net]),
        Err(EvalError::Grid(_))
    ));
    assert!(p.with("no_such_key", "1").is_err());
}

#[test]
fn reports_are_deterministic_and_versioned() {
    let nets = vec![benchmark("msra-a").unwrap(), tiny()];
    let c1 = compare(&DesignPoint::baseline(), &DesignPoint::newton(), &nets).unwrap();
    let c2 = compare(&DesignPoint::baseline(), &DesignPoint::newton(), &nets).unwrap();
    assert_eq!(to_json(&c1).unwrap(), to_json(&c2).unwrap());
    assert!(to_json(&c1).unwrap().contains("\"schema_version\": 1"));
    let csv = comparison_csv(&c1).unwrap();
    assert_eq!(csv, comparison_csv(&c2).unwrap());
    let lines: Vec<&str> = csv.lines().collect();
    assert_eq!(lines.len(), 1 + nets.len() + 1);
    assert!(lines[0].starts_with("schema_version,baseline,candidate,network,power_reduction"));
    let width = lines[0].split(',').count();
    assert!(lines.iter().all(|l| l.split(',').count() == width));

    let rcsv = reports_csv(&c1.candidate_reports).unwrap();
    let header = rcsv.lines().next().unwrap();
    assert!(header.contains("energy_j_adc") && header.contains("area_mm2_hyper_transport"));
    assert!(rcsv.lines().nth(1).unwrap().starts_with("1,msra-a,newton,"));
}

#[test]
fn attribution_ends_at_the_full_design() {
    let nets = vec![benchmark("vgg-a").unwrap()];
    let a = attribute(&DesignPoint::baseline(), &DEFAULT_STEPS, &nets).unwrap();
    assert_eq!(a.steps.len(), 6);
    let last = a.steps.last().unwrap().comparison.candidate_reports[0].clone();
    let direct = evaluate(&nets[0], &DesignPoint::newton()).unwrap();
    assert_eq!(last.toggles, direct.toggles);
    assert_eq!(last.energy_per_image_j, direct.energy_per_image_j);
    let csv = attribution_csv(&a).unwrap();
    assert_eq!(csv.lines().count(), 7);
    assert_eq!(
        a.step("strassen").unwrap().strassen_freed_imas * 8,
        a.step("strassen").unwrap().strassen_covered_imas
    );
}

fn arb_network() -> impl Strategy<Value = NetworkDesc> {
    (
        4u32..48,
        1u32..64,
        prop::collection::vec((1u32..4, 1u32..600, 1u32..3), 1..5),
        prop::collection::vec(1u32..3000, 0..3),
    )
        .prop_map(|(size, ch, convs, fcs)| {
            let mut rows: Vec<LayerDesc> = convs
                .into_iter()
                .map(|(k, no, s)| LayerDesc::conv(2 * k - 1, 2 * k - 1, no, s))
                .collect();
            rows.extend(fcs.into_iter().map(LayerDesc::fc));
            NetworkDesc::chained("gen", (size, size, ch), rows)
        })
        .prop_filter_map("valid", |n| n.ok())
}

fn arb_point() -> impl Strategy<Value = DesignPoint> {
    (
        any::<[bool; 5]>(),
        0u8..3,
        prop::sample::select(vec![8u32, 32, 128]),
        1u32..5,
    )
        .prop_map(|(b, k, slow, share)| {
            let mut p = DesignPoint::baseline();
            for (key, on) in [
                "compact_htree",
                "adaptive_adc",
                "strassen",
                "spread_buffers",
                "fc_tiles",
            ]
            .into_iter()
            .zip(b)
            {
                p = p.with(key, &on.to_string()).unwrap();
            }
            p.with("karatsuba_level", &k.to_string())
                .and_then(|p| p.with("fc_slowdown", &slow.to_string()))
                .and_then(|p| p.with("fc_adc_share", &share.to_string()))
                .unwrap()
        })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn reports_are_physical(net in arb_network(), point in arb_point()) {
        let r = evaluate(&net, &point).unwrap();
        prop_assert!(r.energy_per_image_j > 0.0 && r.energy_per_image_j.is_finite());
        if r.fc_keeps_pace {
            prop_assert!(r.average_power_w() <= r.peak_power_w * (1.0 + 1e-12));
        }
        prop_assert!(r.latency_s >= r.window_s);
        prop_assert!(r.area_mm2 > 0.0 && r.ce_gops_per_mm2 > 0.0 && r.pe_gops_per_w > 0.0);
        prop_assert_eq!(r.strassen_covered_imas, 8 * r.strassen_freed_imas);
        prop_assert_eq!(&r, &evaluate(&net, &point).unwrap());
    }

    #[test]
    fn sequential_matches_parallel(net in arb_network(), point in arb_point()) {
        let grid = SweepGrid::new().axis("compact_htree", &["false", "true"]);
        let nets = [net];
        let a = sweep_with(&point, &grid, &nets, Execution::Parallel).unwrap();
        let b = sweep_with(&point, &grid, &nets, Execution::Sequential).unwrap();
        prop_assert_eq!(a, b);
    }
}
