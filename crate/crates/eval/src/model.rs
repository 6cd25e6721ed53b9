use std::collections::BTreeMap;

use serde::Serialize;
use xbar_arch::{
    build_chip, build_tile, ArchConfig, Breakdown, Component, TileConfig, TileKind, TileModel,
    Toggles,
};
use xbar_mapper::{plan_network, LayerKind, MappingPlan, NetworkDesc};
use xbar_numerics::karatsuba_cost;

use crate::verify::{exact_guard, numerics_gate};
use crate::{DesignPoint, EvalError, Result, SCHEMA_VERSION};

/// Steady-state results of one network on one design point.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EvalReport {
    pub schema_version: u32,
    pub network: String,
    pub design: String,
    pub toggles: Toggles,
    pub latency_s: f64,
    pub throughput_images_per_s: f64,
    pub energy_per_image_j: f64,
    pub energy_per_op_pj: f64,
    pub ops_per_image: f64,
    pub peak_power_w: f64,
    pub area_mm2: f64,
    /// GOPS per mm² at the steady-state rate.
    pub ce_gops_per_mm2: f64,
    /// GOPS per W at peak power.
    pub pe_gops_per_w: f64,
    pub conv_imas: usize,
    pub fc_imas: usize,
    pub conv_tiles: f64,
    pub fc_tiles: f64,
    pub chips: f64,
    pub window_s: f64,
    pub fc_window_s: f64,
    /// Time between successive images entering the pipeline.
    pub pipeline_interval_s: f64,
    pub binding_constraint: String,
    /// Every FC IMA finishes its window within one pipeline interval.
    pub fc_keeps_pace: bool,
    pub adc_power_share: f64,
    pub max_tile_buffer_bytes: f64,
    pub edram_overflow_tiles: usize,
    /// IMAs inside 2x2 Strassen block groups, and those freed from them.
    pub strassen_covered_imas: usize,
    pub strassen_freed_imas: usize,
    /// One-time weight load, excluded from throughput and latency.
    pub weight_preload_s: f64,
    /// Adaptive ADC (if enabled) keeps enough guard bits to be bit-exact.
    pub exact_numerics: bool,
    pub energy_j: Breakdown,
    pub peak_power_mw: Breakdown,
    pub area_breakdown_mm2: Breakdown,
    /// Model constants that are assumptions rather than published costs.
    pub assumptions: BTreeMap<String, f64>,
}

impl EvalReport {
    /// Average power at the steady-state image rate.
    pub fn average_power_w(&self) -> f64 {
        self.energy_per_image_j * self.throughput_images_per_s
    }

    pub fn throughput_per_area(&self) -> f64 {
        self.throughput_images_per_s / self.area_mm2
    }
}

fn activity(c: Component, utilization: f64, density: f64) -> f64 {
    match c {
        Component::Adc | Component::Htree => utilization,
        Component::Dac | Component::Crossbar => utilization * density,
        _ => 1.0,
    }
}

fn tile_model(arch: &ArchConfig, kind: TileKind) -> Result<TileModel> {
    Ok(build_tile(
        &TileConfig::from_arch(arch, kind),
        &arch.catalog,
        &arch.constants,
        &arch.adc_power_model(),
    )?)
}

/// Runs the analytic execution model for an existing plan.
pub fn simulate(plan: &MappingPlan, point: &DesignPoint, net: &NetworkDesc) -> Result<EvalReport> {
    let arch = &point.arch;
    arch.validate()?;
    if plan.network != net.name {
        return Err(EvalError::PlanMismatch {
            plan: plan.network.clone(),
            network: net.name.clone(),
        });
    }
    let t = &arch.toggles;
    numerics_gate(t.karatsuba_level, t.strassen, t.adaptive_adc)?;

    let conv = tile_model(arch, TileKind::Conv)?;
    let fc = tile_model(arch, TileKind::Fc)?;
    let per_tile = arch.chip.imas_per_tile as f64;
    let density = arch.constants.input_bit_density;
    let base_window = karatsuba_cost(0)?.iterations as f64 * arch.constants.cycle_s();
    let tc = conv.ima.window_s;
    let tf = fc.ima.window_s;

    let inst = net.instances();
    let mut energy = Breakdown::new();
    let (mut latency, mut ops, mut weight_bits) = (0.0, 0.0, 0.0);
    let (mut conv_imas, mut fc_imas) = (0usize, 0usize);
    let mut router_time: (f64, String) = (0.0, String::new());
    for lp in &plan.layers {
        let layer = &inst[lp.index];
        let tile = if lp.tile_kind == TileKind::Fc {
            &fc
        } else {
            &conv
        };
        let window = tile.ima.window_s;
        let u = lp.fold.cell_utilization;
        let windows = if layer.kind == LayerKind::Conv {
            latency += lp.steps_per_replica as f64 * window;
            lp.steps as f64 * lp.ima_count as f64 / lp.replication as f64
        } else {
            latency += window;
            lp.ima_count as f64
        };
        for (&c, &p_mw) in &tile.ima.peak_power_mw.0 {
            energy.add(c, p_mw * 1e-3 * window * windows * activity(c, u, density));
        }
        for (&c, &p_mw) in &tile.shared_power_mw.0 {
            energy.add(c, p_mw * 1e-3 / per_tile * base_window * windows * u);
        }
        if lp.strassen_freed > 0 {
            energy.add(
                Component::StrassenAdders,
                arch.catalog.strassen_adder.power_mw * 1e-3 * window * windows,
            );
        }
        match lp.tile_kind {
            TileKind::Conv => conv_imas += lp.ima_count,
            TileKind::Fc => fc_imas += lp.ima_count,
        }
        ops += 2.0 * layer.macs() as f64;
        weight_bits += (lp.fold.rows * lp.fold.cols) as f64 * 16.0 * lp.replication as f64;

        let ports = lp.tile_ids.len() as f64;
        let bits = (layer.input_w as f64) * (layer.input_h as f64) * (layer.ni as f64) * 16.0;
        let secs = bits / (ports * arch.constants.router_gbps * 1e9);
        if secs > router_time.0 {
            router_time = (secs, lp.name.clone());
        }
    }

    let conv_tiles = conv_imas as f64 / per_tile;
    let fc_tiles = fc_imas as f64 / per_tile;
    let mut tiles = vec![(conv.clone(), conv_tiles)];
    if fc_imas > 0 {
        tiles.push((fc.clone(), fc_tiles));
    }
    let chip = build_chip(&tiles, &arch.catalog, &arch.constants)?;
    let peak_w = chip.peak_power_mw.total() * 1e-3;
    let area = chip.area_mm2.total();

    let slowest = plan
        .layers
        .iter()
        .filter(|l| l.kind == LayerKind::Conv)
        .max_by_key(|l| l.steps_per_replica)
        .expect("plans always hold a conv layer");
    let pipeline = tc * slowest.steps_per_replica as f64;
    let (interval, binding) = if router_time.0 > pipeline {
        (
            router_time.0,
            format!("router bandwidth ({})", router_time.1),
        )
    } else {
        (pipeline, format!("pipeline ({})", slowest.name))
    };
    let throughput = 1.0 / interval;
    let e_image = energy.total();
    let ops_per_s = ops * throughput;
    let guard = exact_guard()?;
    let exact = !t.adaptive_adc || guard.is_some_and(|g| t.guard_bits >= g);
    let ht_bps = arch.catalog.hyper_transport_gbytes_per_link
        * 8e9
        * arch.catalog.hyper_transport_links
        * chip.chips.ceil().max(1.0);

    Ok(EvalReport {
        schema_version: SCHEMA_VERSION,
        network: net.name.clone(),
        design: point.label.clone(),
        toggles: t.clone(),
        latency_s: latency,
        throughput_images_per_s: throughput,
        energy_per_image_j: e_image,
        energy_per_op_pj: e_image / ops * 1e12,
        ops_per_image: ops,
        peak_power_w: peak_w,
        area_mm2: area,
        ce_gops_per_mm2: ops_per_s * 1e-9 / area,
        pe_gops_per_w: ops_per_s * 1e-9 / peak_w,
        conv_imas,
        fc_imas,
        conv_tiles,
        fc_tiles,
        chips: chip.chips,
        window_s: tc,
        fc_window_s: tf,
        pipeline_interval_s: interval,
        binding_constraint: binding,
        fc_keeps_pace: fc_imas == 0 || tf <= interval,
        adc_power_share: chip.adc_power_share,
        max_tile_buffer_bytes: plan.max_tile_buffer,
        edram_overflow_tiles: plan.overflow_tiles.len(),
        strassen_covered_imas: plan.layers.iter().map(|l| l.strassen_covered).sum(),
        strassen_freed_imas: plan.strassen_freed(),
        weight_preload_s: weight_bits / ht_bps,
        exact_numerics: exact,
        energy_j: energy,
        peak_power_mw: chip.peak_power_mw,
        area_breakdown_mm2: chip.area_mm2,
        assumptions: arch
            .constants
            .assumptions()
            .into_iter()
            .map(|(k, v)| (k.to_string(), v))
            .chain([
                ("edram_kb_per_conv_tile".to_string(), arch.conv_edram_kb()),
                ("adc_cdac_fraction".to_string(), arch.adc.cdac_fraction),
            ])
            .collect(),
    })
}

/// Plans `net` on the point's architecture and simulates it.
pub fn evaluate(net: &NetworkDesc, point: &DesignPoint) -> Result<EvalReport> {
    let plan = plan_network(net, &point.arch)?;
    simulate(&plan, point, net)
}
