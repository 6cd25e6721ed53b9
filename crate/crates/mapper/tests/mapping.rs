use proptest::prelude::*;
use xbar_arch::{ArchConfig, ImaConfig, TileKind};
use xbar_mapper::{
    buffer_requirement, crossbars_for_layer, plan_network, replication_factors,
    suite_underutilization, BufferMode, Granularity, LayerDesc, NetworkDesc,
};

fn vgg_a() -> NetworkDesc {
    NetworkDesc::chained(
        "vgg-a",
        (224, 224, 3),
        vec![
            LayerDesc::conv(3, 3, 64, 1),
            LayerDesc::pool(2, 2),
            LayerDesc::conv(3, 3, 128, 1),
            LayerDesc::pool(2, 2),
            LayerDesc::conv(3, 3, 256, 1).times(2),
            LayerDesc::pool(2, 2),
            LayerDesc::conv(3, 3, 512, 1).times(2),
            LayerDesc::pool(2, 2),
            LayerDesc::conv(3, 3, 512, 1).times(2),
            LayerDesc::pool(2, 2),
            LayerDesc::fc(4096).times(2),
            LayerDesc::fc(1000),
        ],
    )
    .unwrap()
}

fn conv_ima() -> ImaConfig {
    ImaConfig::from_arch(&ArchConfig::isaac_like(), TileKind::Conv)
}

#[test]
fn vgg_first_layer_replication() {
    let r = replication_factors(&vgg_a()).unwrap();
    assert_eq!(r[0], 256);
    assert_eq!(*r.iter().min().unwrap(), 1);
    assert_eq!(r[r.len() - 4], 1);
}

#[test]
fn vgg_first_layer_fold_and_buffer() {
    let l = &vgg_a().instances()[0];
    let f = crossbars_for_layer(l, &conv_ima());
    assert_eq!((f.rows, f.cols, f.ima_count), (27, 64, 1));
    assert!((f.cell_utilization - 0.052_734_375).abs() < 1e-12);
    assert_eq!(buffer_requirement(l, BufferMode::Naive, 1), 2706.0);
}

#[test]
fn fc_tiles_pack_four_times_the_outputs() {
    let fc = ImaConfig::from_arch(&ArchConfig::newton(), TileKind::Fc);
    let n = NetworkDesc::chained("fc", (1, 1, 4096), vec![LayerDesc::fc(4096)]).unwrap();
    let f = crossbars_for_layer(&n.instances()[0], &fc);
    assert_eq!(f.ima_count, 128);
    assert_eq!(f.crossbar_count, 128 * 64);
    assert_eq!(f.cell_utilization, 1.0);
}

#[test]
fn larger_imas_waste_more() {
    let small = suite_underutilization(&[vgg_a()], &conv_ima(), Granularity::Cell).unwrap();
    let mut big = conv_ima();
    big.max_inputs = 8192;
    big.outputs = 1024;
    big.base_crossbars = 8192 / 128 * 1024 / 128 * 8;
    let big = suite_underutilization(&[vgg_a()], &big, Granularity::Cell).unwrap();
    assert!(
        big.mean > small.mean + 0.1,
        "{} vs {}",
        big.mean,
        small.mean
    );
}

#[test]
fn plan_invariants_on_vgg() {
    for arch in [ArchConfig::isaac_like(), ArchConfig::newton()] {
        let p = plan_network(&vgg_a(), &arch).unwrap();
        p.check(&arch).unwrap();
        assert_eq!(p.layers[0].ima_count, 256);
    }
}

fn arb_network() -> impl Strategy<Value = NetworkDesc> {
    let conv = (1u32..=5, 1u32..=600, 1u32..=2).prop_map(|(k, no, s)| LayerDesc::conv(k, k, no, s));
    (
        prop::collection::vec(conv, 1..5),
        4u32..=40,
        1u32..=64,
        prop::option::of(1u32..=2000),
    )
        .prop_map(|(mut rows, size, ch, fc)| {
            if let Some(n) = fc {
                rows.push(LayerDesc::fc(n));
            }
            NetworkDesc::chained("gen", (size, size, ch), rows).unwrap()
        })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn every_plan_is_well_formed(net in arb_network(), newton in any::<bool>()) {
        let arch = if newton { ArchConfig::newton() } else { ArchConfig::isaac_like() };
        let p = plan_network(&net, &arch).unwrap();
        prop_assert_eq!(p.check(&arch), Ok(()));
        for l in &p.layers {
            prop_assert!(l.replication >= 1);
            prop_assert!(l.fold.cell_utilization > 0.0 && l.fold.cell_utilization <= 1.0);
            prop_assert!(l.fold.crossbar_utilization >= l.fold.cell_utilization - 1e-12);
        }
    }

    #[test]
    fn spread_buffers_never_exceed_naive(net in arb_network()) {
        let mut arch = ArchConfig::isaac_like();
        let naive = plan_network(&net, &arch).unwrap();
        arch.toggles.spread_buffers = true;
        let spread = plan_network(&net, &arch).unwrap();
        prop_assert_eq!(naive.total_crossbars(), spread.total_crossbars());
        for (a, b) in naive.layers.iter().zip(&spread.layers) {
            prop_assert!(b.buffer_bytes_per_tile <= a.buffer_bytes_per_tile);
        }
        for (a, b) in naive.tiles.iter().zip(&spread.tiles) {
            prop_assert!(b.buffer_bytes <= a.buffer_bytes + 1e-9);
        }
    }

    #[test]
    fn strassen_frees_exactly_one_per_eight(net in arb_network()) {
        let mut arch = ArchConfig::isaac_like();
        arch.toggles.strassen = true;
        let p = plan_network(&net, &arch).unwrap();
        for l in &p.layers {
            prop_assert_eq!(l.strassen_freed, l.strassen_covered / 8);
            prop_assert_eq!(l.strassen_covered % 8, 0);
        }
    }
}
