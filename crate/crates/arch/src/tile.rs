use serde::{Deserialize, Serialize};
use xbar_adc::AdcPowerModel;

use crate::{
    build_ima, ArchConfig, ArchError, Breakdown, Catalog, Component, ImaConfig, ImaModel,
    ModelConstants, Result,
};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TileKind {
    Conv,
    Fc,
}

#[derive(Debug, Clone, PartialEq)]
pub struct TileConfig {
    pub kind: TileKind,
    pub imas: usize,
    pub edram_kb: f64,
    pub ima: ImaConfig,
}

impl TileConfig {
    /// Tile of the given kind as configured by `arch`. Without dedicated FC
    /// tiles, FC layers run on ordinary conv tiles.
    pub fn from_arch(arch: &ArchConfig, kind: TileKind) -> TileConfig {
        let fc = kind == TileKind::Fc && arch.toggles.fc_tiles;
        let kind = if fc { TileKind::Fc } else { TileKind::Conv };
        TileConfig {
            kind,
            imas: arch.chip.imas_per_tile,
            edram_kb: if fc {
                arch.memory.fc_edram_kb
            } else {
                arch.conv_edram_kb()
            },
            ima: ImaConfig::from_arch(arch, kind),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct TileModel {
    pub config: TileConfig,
    pub ima: ImaModel,
    /// Tile-level components only (buffer, bus, router share, activation units).
    pub shared_power_mw: Breakdown,
    pub shared_area_mm2: Breakdown,
    /// Everything on the tile, IMAs included.
    pub peak_power_mw: Breakdown,
    pub area_mm2: Breakdown,
}

pub fn build_tile(
    cfg: &TileConfig,
    catalog: &Catalog,
    constants: &ModelConstants,
    adc_model: &AdcPowerModel,
) -> Result<TileModel> {
    if cfg.imas == 0 {
        return Err(ArchError::Invalid("a tile needs at least one IMA".into()));
    }
    if cfg.edram_kb < 0.0 {
        return Err(ArchError::Invalid("eDRAM size cannot be negative".into()));
    }
    let ima = build_ima(&cfg.ima, catalog, constants, adc_model)?;
    let light = if cfg.kind == TileKind::Fc { 0.25 } else { 1.0 };
    let edram = catalog.edram_for_kb(cfg.edram_kb);
    let router = catalog.router_per_tile();
    let sig_pool_p =
        catalog.sigmoids_per_tile * catalog.sigmoid.power_mw + catalog.max_pool.power_mw;
    let sig_pool_a =
        catalog.sigmoids_per_tile * catalog.sigmoid.area_mm2 + catalog.max_pool.area_mm2;

    let mut sp = Breakdown::new();
    sp.add(Component::Edram, edram.power_mw);
    sp.add(Component::Bus, catalog.bus.power_mw * light);
    sp.add(Component::Router, router.power_mw);
    sp.add(Component::SigmoidPool, sig_pool_p * light);
    let mut sa = Breakdown::new();
    sa.add(Component::Edram, edram.area_mm2);
    sa.add(Component::Bus, catalog.bus.area_mm2);
    sa.add(Component::Router, router.area_mm2);
    sa.add(Component::SigmoidPool, sig_pool_a);

    let n = cfg.imas as f64;
    let mut p = ima.peak_power_mw.scaled(n);
    p.merge(&sp);
    let mut a = ima.area_mm2.scaled(n);
    a.merge(&sa);
    Ok(TileModel {
        config: cfg.clone(),
        ima,
        shared_power_mw: sp,
        shared_area_mm2: sa,
        peak_power_mw: p,
        area_mm2: a,
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct ChipModel {
    pub tiles: f64,
    /// Chip equivalents of HyperTransport, proportional to tile area.
    pub chips: f64,
    pub peak_power_mw: Breakdown,
    pub area_mm2: Breakdown,
    pub adc_power_share: f64,
}

/// Aggregates `(tile, count)` pairs (counts may be fractional when a
/// workload only partly fills a tile) and adds HyperTransport in proportion
/// to the tile area.
pub fn build_chip(
    tiles: &[(TileModel, f64)],
    catalog: &Catalog,
    constants: &ModelConstants,
) -> Result<ChipModel> {
    if tiles.is_empty() || tiles.iter().all(|(_, n)| *n <= 0.0) {
        return Err(ArchError::Invalid("a chip needs at least one tile".into()));
    }
    let mut p = Breakdown::new();
    let mut a = Breakdown::new();
    let mut count = 0.0;
    for (t, n) in tiles {
        p.merge(&t.peak_power_mw.scaled(*n));
        a.merge(&t.area_mm2.scaled(*n));
        count += n;
    }
    let chips = a.total() / constants.chip_tile_area_mm2;
    p.add(
        Component::HyperTransport,
        chips * catalog.hyper_transport.power_mw,
    );
    a.add(
        Component::HyperTransport,
        chips * catalog.hyper_transport.area_mm2,
    );
    Ok(ChipModel {
        tiles: count,
        chips,
        adc_power_share: p.share(Component::Adc),
        peak_power_mw: p,
        area_mm2: a,
    })
}
