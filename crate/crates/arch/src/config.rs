use serde::{Deserialize, Serialize};
use xbar_adc::{AdcPowerModel, CdacModel};

use crate::{ArchError, Catalog, ModelConstants, Result, SCHEMA_VERSION};

/// Optimization switches; each is independent of the others.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Toggles {
    /// Shift-and-add inside the HTree so links carry partial sums.
    pub compact_htree: bool,
    /// Per-sample ADC resolution from the output window.
    pub adaptive_adc: bool,
    /// Sample bits kept below the output window by the adaptive ADC.
    pub guard_bits: u32,
    /// 0 (off), 1 or 2 applications of the Karatsuba split.
    pub karatsuba_level: u8,
    pub strassen: bool,
    /// Spread layers across tiles so each tile buffers a slice of the rows.
    pub spread_buffers: bool,
    /// Dedicated FC tiles with shared, slower ADCs.
    pub fc_tiles: bool,
    /// FC-tile ADC rate divisor.
    pub fc_slowdown: u32,
    /// Crossbars per ADC on FC tiles.
    pub fc_adc_share: u32,
    /// Signed-data encoding that saves one ADC decision (energy only).
    pub encoding_saving: bool,
}

impl Default for Toggles {
    fn default() -> Self {
        Toggles::baseline()
    }
}

impl Toggles {
    pub fn baseline() -> Self {
        Toggles {
            compact_htree: false,
            adaptive_adc: false,
            guard_bits: 0,
            karatsuba_level: 0,
            strassen: false,
            spread_buffers: false,
            fc_tiles: false,
            fc_slowdown: 128,
            fc_adc_share: 4,
            encoding_saving: false,
        }
    }

    pub fn all_on() -> Self {
        Toggles {
            compact_htree: true,
            adaptive_adc: true,
            karatsuba_level: 1,
            strassen: true,
            spread_buffers: true,
            fc_tiles: true,
            ..Toggles::baseline()
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ImaGeometry {
    pub xbar_rows: usize,
    pub xbar_cols: usize,
    pub cell_bits: u32,
    pub weight_bits: u32,
    pub input_bits: u32,
    /// Output neurons per IMA on conv tiles.
    pub outputs: usize,
    pub adcs: usize,
}

impl Default for ImaGeometry {
    fn default() -> Self {
        ImaGeometry {
            xbar_rows: 128,
            xbar_cols: 128,
            cell_bits: 2,
            weight_bits: 16,
            input_bits: 16,
            outputs: 256,
            adcs: 16,
        }
    }
}

impl ImaGeometry {
    pub fn slices(&self) -> usize {
        self.weight_bits.div_ceil(self.cell_bits) as usize
    }

    /// Crossbars of a plain (non-Karatsuba) conv IMA.
    pub fn base_crossbars(&self) -> usize {
        self.slices() * self.outputs.div_ceil(self.xbar_cols)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ChipSettings {
    pub imas_per_tile: usize,
    /// Tile budget; 0 sizes the chip to the workload.
    pub max_tiles: usize,
}

impl Default for ChipSettings {
    fn default() -> Self {
        ChipSettings {
            imas_per_tile: 16,
            max_tiles: 0,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct MemorySettings {
    /// Conv-tile eDRAM with layers spread across tiles.
    pub spread_edram_kb: f64,
    /// Conv-tile eDRAM with whole layers per tile group.
    pub naive_edram_kb: f64,
    pub fc_edram_kb: f64,
    /// Input register bytes per IMA without and with the compact HTree.
    pub input_register_bytes: f64,
    pub compact_input_register_bytes: f64,
}

impl Default for MemorySettings {
    fn default() -> Self {
        MemorySettings {
            spread_edram_kb: 16.0,
            naive_edram_kb: 64.0,
            fc_edram_kb: 4.0,
            input_register_bytes: 2048.0,
            compact_input_register_bytes: 256.0,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum CdacKind {
    #[default]
    Linear,
    BinaryWeighted,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct AdcSettings {
    pub cdac_fraction: f64,
    pub cdac_model: CdacKind,
}

impl Default for AdcSettings {
    fn default() -> Self {
        AdcSettings {
            cdac_fraction: 1.0 / 3.0,
            cdac_model: CdacKind::Linear,
        }
    }
}

/// Everything the mapper and evaluator need to know about a design point.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ArchConfig {
    pub schema_version: u32,
    pub name: String,
    pub toggles: Toggles,
    pub ima: ImaGeometry,
    pub chip: ChipSettings,
    pub memory: MemorySettings,
    pub adc: AdcSettings,
    pub constants: ModelConstants,
    pub catalog: Catalog,
}

impl Default for ArchConfig {
    fn default() -> Self {
        ArchConfig::isaac_like()
    }
}

impl ArchConfig {
    /// Baseline: every optimization off.
    pub fn isaac_like() -> Self {
        ArchConfig {
            schema_version: SCHEMA_VERSION,
            name: "isaac".into(),
            toggles: Toggles::baseline(),
            ima: ImaGeometry::default(),
            chip: ChipSettings::default(),
            memory: MemorySettings::default(),
            adc: AdcSettings::default(),
            constants: ModelConstants::default(),
            catalog: Catalog::default(),
        }
    }

    /// Every optimization on.
    pub fn newton() -> Self {
        ArchConfig {
            name: "newton".into(),
            toggles: Toggles::all_on(),
            ..ArchConfig::isaac_like()
        }
    }

    pub fn from_toml_str(text: &str) -> Result<Self> {
        let cfg: ArchConfig = toml::from_str(text)?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn to_toml_string(&self) -> Result<String> {
        Ok(toml::to_string_pretty(self)?)
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |m: String| Err(ArchError::Invalid(m));
        if self.schema_version != SCHEMA_VERSION {
            return bad(format!(
                "schema_version {} is not supported (expected {SCHEMA_VERSION})",
                self.schema_version
            ));
        }
        let t = &self.toggles;
        if t.karatsuba_level > xbar_numerics::MAX_LEVEL {
            return bad(format!("karatsuba_level {} > 2", t.karatsuba_level));
        }
        if t.guard_bits > 10 {
            return bad(format!("guard_bits {} > 10", t.guard_bits));
        }
        if t.fc_slowdown == 0 || t.fc_adc_share == 0 {
            return bad("fc_slowdown and fc_adc_share must be positive".into());
        }
        let g = &self.ima;
        if g.xbar_rows == 0 || g.xbar_cols == 0 || g.outputs == 0 || g.adcs == 0 {
            return bad("IMA geometry must be positive".into());
        }
        if g.cell_bits == 0 || g.weight_bits == 0 || g.input_bits == 0 {
            return bad("bit widths must be positive".into());
        }
        if self.chip.imas_per_tile == 0 {
            return bad("imas_per_tile must be positive".into());
        }
        if self.constants.cycle_ns <= 0.0 {
            return bad("cycle_ns must be positive".into());
        }
        if self.constants.router_gbps <= 0.0 {
            return bad("router_gbps must be positive".into());
        }
        self.adc_power_model().validate()?;
        Ok(())
    }

    pub fn adc_power_model(&self) -> AdcPowerModel {
        AdcPowerModel {
            base_power_mw: self.catalog.adc.power_mw,
            base_rate_sps: self.catalog.adc_rate_sps,
            cdac_model: match self.adc.cdac_model {
                CdacKind::Linear => CdacModel::Linear,
                CdacKind::BinaryWeighted => CdacModel::BinaryWeighted,
            },
            encoding_saving: self.toggles.encoding_saving,
            ..AdcPowerModel::with_cdac_fraction(self.adc.cdac_fraction)
        }
    }

    /// Conv-tile eDRAM size for the configured buffer mapping.
    pub fn conv_edram_kb(&self) -> f64 {
        if self.toggles.spread_buffers {
            self.memory.spread_edram_kb
        } else {
            self.memory.naive_edram_kb
        }
    }

    /// Sets one field by dotted path, e.g. `toggles.fc_slowdown` or
    /// `catalog.adc.power_mw`. Bare toggle names are accepted too.
    /// `value` is read as a TOML literal, falling back to a plain string.
    pub fn set(&mut self, key: &str, value: &str) -> Result<()> {
        let path: Vec<&str> = if key.contains('.') {
            key.split('.').collect()
        } else if Toggles::baseline_has(key) {
            vec!["toggles", key]
        } else {
            vec![key]
        };
        let mut root = toml::Value::try_from(&*self)?;
        let mut slot = &mut root;
        for part in &path {
            slot = slot
                .get_mut(*part)
                .ok_or_else(|| ArchError::UnknownKey(key.to_string()))?;
        }
        let parsed = parse_literal(value);
        let coerced = match (&*slot, parsed) {
            (toml::Value::Float(_), toml::Value::Integer(i)) => toml::Value::Float(i as f64),
            (_, v) => v,
        };
        if std::mem::discriminant(&*slot) != std::mem::discriminant(&coerced) {
            return Err(ArchError::BadValue {
                key: key.into(),
                reason: format!("expected a {}, got `{value}`", slot.type_str()),
            });
        }
        *slot = coerced;
        let updated: ArchConfig =
            root.try_into()
                .map_err(|e: toml::de::Error| ArchError::BadValue {
                    key: key.into(),
                    reason: e.to_string(),
                })?;
        updated.validate()?;
        *self = updated;
        Ok(())
    }
}

impl Toggles {
    fn baseline_has(key: &str) -> bool {
        toml::Value::try_from(Toggles::baseline())
            .ok()
            .and_then(|v| v.get(key).cloned())
            .is_some()
    }
}

fn parse_literal(text: &str) -> toml::Value {
    let doc = format!("v = {text}");
    match toml::from_str::<toml::Table>(&doc) {
        Ok(mut t) => t.remove("v").unwrap_or(toml::Value::String(text.into())),
        Err(_) => toml::Value::String(text.into()),
    }
}
