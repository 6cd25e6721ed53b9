use std::path::Path;

use proptest::prelude::*;
use xbar_arch::{ArchConfig, ImaConfig, TileKind};
use xbar_mapper::{
    plan_network, suite_underutilization, Granularity, LayerDesc, LayerKind, NetworkDesc,
};
use xbar_workloads::{
    benchmark, load_arch, load_network, parse_network, suite, write_network, WorkloadError,
    BENCHMARKS,
};

fn conv_count(n: &NetworkDesc) -> usize {
    n.compute_layers()
        .iter()
        .filter(|l| l.kind == LayerKind::Conv)
        .count()
}

#[test]
fn table_shapes() {
    let counts: Vec<(String, usize, usize)> = suite()
        .unwrap()
        .iter()
        .map(|n| {
            let c = conv_count(n);
            (n.name.clone(), c, n.compute_layers().len() - c)
        })
        .collect();
    let want = [
        ("alexnet", 5, 3),
        ("vgg-a", 8, 3),
        ("vgg-b", 13, 3),
        ("vgg-c", 13, 3),
        ("vgg-d", 16, 3),
        ("msra-a", 16, 3),
        ("msra-b", 19, 3),
        ("msra-c", 19, 3),
        ("resnet-34", 33, 1),
    ];
    for ((n, c, f), (wn, wc, wf)) in counts.iter().zip(want) {
        assert_eq!((n.as_str(), *c, *f), (wn, wc, wf));
    }
}

#[test]
fn alexnet_first_layer() {
    let n = benchmark("alexnet").unwrap();
    let l = &n.instances()[0];
    assert_eq!((l.kx, l.ky, l.no, l.stride), (11, 11, 96, 4));
    assert_eq!(l.output_w, 56);
    let fc = n.compute_layers();
    assert_eq!(fc[5].ni, 256 * 7 * 7);
}

#[test]
fn resnet_begins_with_strided_seven() {
    let n = benchmark("resnet-34").unwrap();
    let l = &n.instances()[0];
    assert_eq!((l.kx, l.no, l.stride, l.output_w), (7, 64, 2, 112));
    assert_eq!(n.skip_edges().len(), 16);
    assert_eq!(n.compute_layers().last().unwrap().ni, 512);
}

#[test]
fn msra_spp_feeds_fc() {
    for name in ["msra-a", "msra-b"] {
        let n = benchmark(name).unwrap();
        let fc = n
            .compute_layers()
            .into_iter()
            .find(|l| l.kind == LayerKind::Fc)
            .unwrap();
        assert_eq!(fc.ni, 512 * 63);
    }
}

#[test]
fn every_benchmark_round_trips() {
    for (name, text) in BENCHMARKS {
        let n = parse_network(text).unwrap();
        assert_eq!(n.name, name);
        assert_eq!(parse_network(&write_network(&n)).unwrap(), n, "{name}");
    }
}

#[test]
fn shipped_arch_files_match_builtins() {
    assert_eq!(
        load_arch(Path::new("isaac")).unwrap(),
        ArchConfig::isaac_like()
    );
    assert_eq!(
        load_arch(Path::new("newton")).unwrap(),
        ArchConfig::newton()
    );
    let dir = Path::new(env!("CARGO_MANIFEST_DIR")).join("data/arch/newton.arch");
    assert_eq!(load_arch(&dir).unwrap(), ArchConfig::newton());
}

#[test]
fn files_load_by_path_and_name() {
    let p = Path::new(env!("CARGO_MANIFEST_DIR")).join("data/networks/vgg-c.net");
    assert_eq!(load_network(&p).unwrap(), benchmark("vgg-c").unwrap());
    assert_eq!(load_network(Path::new("vgg-c")).unwrap().name, "vgg-c");
    assert!(matches!(
        load_network(Path::new("/nonexistent/file.net")),
        Err(WorkloadError::Io { .. })
    ));
}

#[test]
fn mismatched_chain_names_the_pair() {
    let text = "network bad\ninput 8x8x3\nconv 3x3, 16\nfc 10\n";
    let mut n = parse_network(text).unwrap();
    n.layers[1].ni = 99;
    let err = n.validate().unwrap_err().to_string();
    assert!(err.contains("#1") && err.contains("#2"), "{err}");
}

#[test]
fn parse_errors_carry_file_and_position() {
    let dir = std::env::temp_dir().join(format!("xbar-wl-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let p = dir.join("broken.net");
    std::fs::write(&p, "network b\ninput 8x8\n").unwrap();
    let err = load_network(&p).unwrap_err().to_string();
    assert!(err.contains("broken.net:2:"), "{err}");
    std::fs::write(&p, "").unwrap();
    assert!(load_network(&p).is_err());
    std::fs::remove_dir_all(dir).unwrap();
}

#[test]
fn suite_underutilization_is_small_for_default_ima() {
    let ima = ImaConfig::from_arch(&ArchConfig::isaac_like(), TileKind::Conv);
    let nets = suite().unwrap();
    let x = suite_underutilization(&nets, &ima, Granularity::Crossbar).unwrap();
    let c = suite_underutilization(&nets, &ima, Granularity::Cell).unwrap();
    println!("crossbar {:.4} cell {:.4}", x.mean, c.mean);
    for (n, v) in &x.per_network {
        println!("  {n:10} {v:.4}");
    }
    assert!((x.mean - 0.09).abs() <= 0.04, "{}", x.mean);
    assert!(c.mean >= x.mean);
}

#[test]
fn spread_buffers_fit_sixteen_kb_at_256() {
    let mut naive = ArchConfig::isaac_like();
    naive.toggles.spread_buffers = false;
    let mut spread = naive.clone();
    spread.toggles.spread_buffers = true;
    for net in suite().unwrap() {
        let net = net.with_input_size(256, 256).unwrap();
        let s = plan_network(&net, &spread).unwrap();
        let n = plan_network(&net, &naive).unwrap();
        println!(
            "{:10} spread {:8.0} naive {:8.0} ratio {:.1}",
            net.name,
            s.max_tile_buffer,
            n.max_tile_buffer,
            n.max_tile_buffer / s.max_tile_buffer
        );
        assert!(s.max_tile_buffer <= 16.0 * 1024.0, "{}", net.name);
        assert!(n.max_tile_buffer >= 4.0 * s.max_tile_buffer, "{}", net.name);
    }
}

fn arb_layer() -> impl Strategy<Value = LayerDesc> {
    prop_oneof![
        (1u32..8, 1u32..8, 1u32..600, 1u32..4, 1u32..4, any::<bool>()).prop_map(
            |(kx, ky, no, s, t, r)| {
                let l = LayerDesc::conv(kx, ky, no, s).times(t);
                if r {
                    l.residual()
                } else {
                    l
                }
            }
        ),
        (1u32..4, 1u32..4).prop_map(|(k, s)| LayerDesc::pool(k, s)),
        (1u32..5000, 1u32..3).prop_map(|(n, t)| LayerDesc::fc(n).times(t)),
        Just(LayerDesc::global_pool()),
        prop::collection::vec(1u32..8, 1..4).prop_map(LayerDesc::spp),
    ]
}

proptest! {
    #[test]
    fn generated_networks_round_trip(
        rows in prop::collection::vec(arb_layer(), 1..8),
        size in 1u32..300,
        ch in 1u32..16,
    ) {
        let net = NetworkDesc::chained("gen-net", (size, size, ch), rows);
        prop_assume!(net.is_ok());
        let net = net.unwrap();
        let text = write_network(&net);
        prop_assert_eq!(parse_network(&text).unwrap(), net);
    }
}
