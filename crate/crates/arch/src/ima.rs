use xbar_adc::{derive_grid_for, full_grid, karatsuba_groups, relative_energy, AdcPowerModel};
use xbar_bitslice::PipelineSpec;
use xbar_numerics::karatsuba_cost;

use crate::{
    ArchConfig, ArchError, Breakdown, Catalog, Component, ModelConstants, Result, TileKind,
};

/// One IMA design: crossbars, converters and the local HTree.
#[derive(Debug, Clone, PartialEq)]
pub struct ImaConfig {
    pub kind: TileKind,
    /// Crossbars before any Karatsuba duplication.
    pub base_crossbars: usize,
    pub adcs: usize,
    /// Crossbars multiplexed onto one ADC.
    pub adc_share: usize,
    pub adc_rate_sps: f64,
    pub xbar_rows: usize,
    pub xbar_cols: usize,
    pub max_inputs: usize,
    pub outputs: usize,
    pub karatsuba_level: u8,
    pub compact_htree: bool,
    pub adaptive_adc: bool,
    pub guard_bits: u32,
    pub input_register_bytes: f64,
}

impl ImaConfig {
    pub fn from_arch(arch: &ArchConfig, kind: TileKind) -> ImaConfig {
        let t = &arch.toggles;
        let g = &arch.ima;
        let share = match kind {
            TileKind::Fc if t.fc_tiles => t.fc_adc_share as usize,
            _ => 1,
        };
        let slowdown = match kind {
            TileKind::Fc if t.fc_tiles => t.fc_slowdown as f64,
            _ => 1.0,
        };
        ImaConfig {
            kind,
            base_crossbars: g.base_crossbars() * share,
            adcs: g.adcs,
            adc_share: share,
            adc_rate_sps: arch.catalog.adc_rate_sps / slowdown,
            xbar_rows: g.xbar_rows,
            xbar_cols: g.xbar_cols,
            max_inputs: g.xbar_rows,
            outputs: g.outputs * share,
            karatsuba_level: t.karatsuba_level,
            compact_htree: t.compact_htree,
            adaptive_adc: t.adaptive_adc,
            guard_bits: t.guard_bits,
            input_register_bytes: if t.compact_htree {
                arch.memory.compact_input_register_bytes
            } else {
                arch.memory.input_register_bytes
            },
        }
    }

    /// Crossbars including the extra Karatsuba sum groups.
    pub fn crossbars(&self) -> usize {
        let extra = karatsuba_cost(self.karatsuba_level)
            .map(|c| c.extra_crossbars as usize)
            .unwrap_or(0);
        self.base_crossbars + extra * self.base_crossbars / 16
    }

    pub fn validate(&self) -> Result<()> {
        if self.base_crossbars == 0 || self.adcs == 0 || self.adc_share == 0 {
            return Err(ArchError::Invalid(
                "IMA needs at least one crossbar and one ADC".into(),
            ));
        }
        if self.base_crossbars != self.adcs * self.adc_share {
            return Err(ArchError::Invalid(format!(
                "{} crossbars cannot be served by {} ADCs at {} crossbars per ADC",
                self.base_crossbars, self.adcs, self.adc_share
            )));
        }
        if self.adc_rate_sps <= 0.0 {
            return Err(ArchError::Invalid("ADC rate must be positive".into()));
        }
        karatsuba_cost(self.karatsuba_level)?;
        Ok(())
    }
}

/// HTree link widths and wire totals for one IMA.
#[derive(Debug, Clone, PartialEq)]
pub struct HtreeModel {
    /// Result-link width at each level, leaf first.
    pub output_widths: Vec<u32>,
    pub input_widths: Vec<u32>,
    /// Link from the tree root to the output register.
    pub root_width: u32,
    /// Σ links × length × width.
    pub area_units: f64,
    /// Σ links × length × bits moved, per window.
    pub energy_units: f64,
}

/// Result widths per HTree level for `leaves` crossbars: plain trees
/// double the bundle each level, shift-and-add trees grow 2 bits per level.
pub fn htree_output_widths(leaves: usize, sample_bits: u32, compact: bool) -> Vec<u32> {
    let levels = leaves.max(2).next_power_of_two().trailing_zeros();
    (0..=levels)
        .map(|j| {
            if compact {
                sample_bits + 2 * j
            } else {
                sample_bits << j
            }
        })
        .collect()
}

fn htree(cfg: &ImaConfig, conversions: u32, resolved_fraction: f64) -> HtreeModel {
    let leaves = 16usize;
    let sample_bits = PipelineSpec::DEFAULT.sample_bits();
    let output_widths = htree_output_widths(leaves, sample_bits, cfg.compact_htree);
    let karatsuba = cfg.karatsuba_level > 0;
    let input_stream_bits: u32 = karatsuba_groups(cfg.karatsuba_level)
        .iter()
        .map(|g| g.iterations)
        .sum::<u32>();
    let rows = cfg.max_inputs as f64;
    let mut input_widths = Vec::new();
    let (mut area, mut e_in, mut e_out) = (0.0, 0.0, 0.0);
    for (j, &wout) in output_widths.iter().enumerate() {
        let links = (leaves >> j) as f64;
        let length = 2f64.powf(j as f64 / 2.0);
        let (win, fanout) = if cfg.compact_htree {
            // Inputs are broadcast; Karatsuba feeds two operand halves
            // into separate subtrees near the root.
            (if karatsuba && j >= 3 { 2 } else { 1 }, 1.0)
        } else {
            (1u32 << j, (1u32 << j) as f64)
        };
        input_widths.push(win);
        area += links * length * (win + wout) as f64;
        e_in += links * length * rows * fanout * input_stream_bits as f64;
        e_out += links * length * rows * wout as f64 * conversions as f64 / 8.0;
    }
    if cfg.adaptive_adc {
        e_out *= resolved_fraction;
    }
    let root_width = if cfg.adaptive_adc { 16 } else { 39 };
    area += root_width as f64 * 2f64.powf(2.5);
    HtreeModel {
        output_widths,
        input_widths,
        root_width,
        area_units: area,
        energy_units: e_in + e_out,
    }
}

/// Cost model of one IMA.
#[derive(Debug, Clone, PartialEq)]
pub struct ImaModel {
    pub config: ImaConfig,
    /// Power with every crossbar busy every cycle, in mW.
    pub peak_power_mw: Breakdown,
    pub area_mm2: Breakdown,
    /// Time to process one 128-input window.
    pub window_s: f64,
    pub iterations: u32,
    /// Column conversions per 128-output half per window.
    pub conversions: u32,
    /// ADC window energy relative to the plain full-resolution pipeline.
    pub adc_energy_factor: f64,
    pub htree: HtreeModel,
}

impl ImaModel {
    pub fn area_total(&self) -> f64 {
        self.area_mm2.total()
    }

    pub fn power_total(&self) -> f64 {
        self.peak_power_mw.total()
    }
}

pub fn build_ima(
    cfg: &ImaConfig,
    catalog: &Catalog,
    constants: &ModelConstants,
    adc_model: &AdcPowerModel,
) -> Result<ImaModel> {
    cfg.validate()?;
    let cost = karatsuba_cost(cfg.karatsuba_level)?;
    let base = karatsuba_cost(0)?;
    let groups = karatsuba_groups(cfg.karatsuba_level);
    let grid = if cfg.adaptive_adc {
        derive_grid_for(&PipelineSpec::DEFAULT, &groups, Some(cfg.guard_bits))?
    } else {
        full_grid(cfg.karatsuba_level)
    };
    let adc_factor = relative_energy(&grid, adc_model);
    let resolved_fraction =
        grid.total_resolved_bits() as f64 / (grid.conversions() as f64 * grid.sample_bits as f64);

    let share = cfg.adc_share as f64;
    let slowdown = catalog.adc_rate_sps / cfg.adc_rate_sps;
    let duty = 1.0 / (share * slowdown);
    let its = cost.iterations as f64;
    let cycle = constants.cycle_s();
    let window_s = its * cycle * share * slowdown;
    let halves = (cfg.outputs / cfg.adc_share).div_ceil(cfg.xbar_cols) as f64;

    let mut p = Breakdown::new();
    let base_window = base.iterations as f64 * cycle;
    let adc_window_energy =
        cfg.adcs as f64 * catalog.adc.power_mw * base_window * adc_factor * share;
    p.add(Component::Adc, adc_window_energy / window_s);
    let active_xbars = halves * cost.adc_conversions as f64 / its;
    p.add(
        Component::Dac,
        active_xbars * catalog.dac_array.power_mw / slowdown,
    );
    p.add(
        Component::Crossbar,
        active_xbars * catalog.crossbar.power_mw / slowdown,
    );
    let ht = htree(cfg, cost.adc_conversions, resolved_fraction);
    p.add(
        Component::Htree,
        ht.energy_units * constants.htree_pj_per_bit * 1e-9 / window_s,
    );
    let ir = catalog.input_register_for_bytes(cfg.input_register_bytes);
    let regs_p = ir.power_mw
        + catalog.output_register.power_mw
        + catalog.shift_adds_per_ima * catalog.shift_add.power_mw;
    p.add(Component::Registers, regs_p * duty);
    let adder_scale = cost.extra_adders as f64 / 128.0;
    if cost.extra_adders > 0 {
        p.add(
            Component::KaratsubaAdders,
            catalog.karatsuba_adder.power_mw * adder_scale * duty,
        );
    }

    let mut a = Breakdown::new();
    a.add(Component::Adc, cfg.adcs as f64 * catalog.adc.area_mm2);
    a.add(
        Component::Dac,
        cfg.base_crossbars as f64 * catalog.dac_array.area_mm2,
    );
    a.add(
        Component::Crossbar,
        cfg.crossbars() as f64 * catalog.crossbar.area_mm2,
    );
    a.add(
        Component::Htree,
        ht.area_units * constants.htree_mm2_per_width,
    );
    a.add(
        Component::Registers,
        ir.area_mm2
            + catalog.output_register.area_mm2
            + catalog.shift_adds_per_ima * catalog.shift_add.area_mm2,
    );
    if cost.extra_adders > 0 {
        a.add(
            Component::KaratsubaAdders,
            catalog.karatsuba_adder.area_mm2 * adder_scale,
        );
    }

    Ok(ImaModel {
        config: cfg.clone(),
        peak_power_mw: p,
        area_mm2: a,
        window_s,
        iterations: cost.iterations,
        conversions: cost.adc_conversions,
        adc_energy_factor: adc_factor,
        htree: ht,
    })
}
