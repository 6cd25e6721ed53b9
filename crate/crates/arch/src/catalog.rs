use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ComponentSpec {
    pub power_mw: f64,
    pub area_mm2: f64,
}

const fn spec(power_mw: f64, area_mm2: f64) -> ComponentSpec {
    ComponentSpec { power_mw, area_mm2 }
}

/// Unit costs of every modeled component.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Catalog {
    /// 8-bit SAR ADC at `adc_rate_sps`.
    pub adc: ComponentSpec,
    pub adc_rate_sps: f64,
    /// Array of 128 one-bit DACs feeding one crossbar.
    pub dac_array: ComponentSpec,
    /// 128×128 memristor crossbar.
    pub crossbar: ComponentSpec,
    /// One router, shared by `router_share` tiles.
    pub router: ComponentSpec,
    pub router_share: f64,
    /// HyperTransport links of one chip.
    pub hyper_transport: ComponentSpec,
    pub hyper_transport_gbytes_per_link: f64,
    pub hyper_transport_links: f64,
    /// 2 KB IMA input register.
    pub input_register: ComponentSpec,
    pub input_register_bytes: f64,
    pub output_register: ComponentSpec,
    pub shift_add: ComponentSpec,
    pub shift_adds_per_ima: f64,
    /// 64 KB tile eDRAM buffer; scaled linearly with size.
    pub edram: ComponentSpec,
    pub edram_kb: f64,
    pub bus: ComponentSpec,
    pub sigmoid: ComponentSpec,
    pub sigmoids_per_tile: f64,
    pub max_pool: ComponentSpec,
    /// Digital adders forming Karatsuba input half-sums, per IMA.
    pub karatsuba_adder: ComponentSpec,
    /// Pre/post-combination adders of Strassen groups, per IMA.
    pub strassen_adder: ComponentSpec,
}

impl Default for Catalog {
    fn default() -> Self {
        Catalog {
            adc: spec(3.1, 0.0015),
            adc_rate_sps: 1.2e9,
            dac_array: spec(0.5, 0.00002),
            crossbar: spec(0.3, 0.0001),
            router: spec(168.0, 0.604),
            router_share: 4.0,
            hyper_transport: spec(10_400.0, 22.88),
            hyper_transport_gbytes_per_link: 6.4,
            hyper_transport_links: 4.0,
            input_register: spec(1.24, 0.0021),
            input_register_bytes: 2048.0,
            output_register: spec(0.23, 0.00077),
            shift_add: spec(0.05, 0.00006),
            shift_adds_per_ima: 4.0,
            edram: spec(20.7, 0.083),
            edram_kb: 64.0,
            bus: spec(7.0, 0.09),
            sigmoid: spec(0.52, 0.0006),
            sigmoids_per_tile: 2.0,
            max_pool: spec(0.4, 0.00024),
            karatsuba_adder: spec(0.05, 0.0001),
            strassen_adder: spec(0.3, 0.0),
        }
    }
}

impl Catalog {
    pub fn edram_for_kb(&self, kb: f64) -> ComponentSpec {
        let k = kb / self.edram_kb;
        spec(self.edram.power_mw * k, self.edram.area_mm2 * k)
    }

    pub fn input_register_for_bytes(&self, bytes: f64) -> ComponentSpec {
        let k = bytes / self.input_register_bytes;
        spec(
            self.input_register.power_mw * k,
            self.input_register.area_mm2 * k,
        )
    }

    pub fn router_per_tile(&self) -> ComponentSpec {
        spec(
            self.router.power_mw / self.router_share,
            self.router.area_mm2 / self.router_share,
        )
    }
}

/// Modeling constants that are not component costs. Several are assumptions
/// and are echoed in every report.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ModelConstants {
    pub cycle_ns: f64,
    /// HTree wire energy per bit moved per unit link length.
    pub htree_pj_per_bit: f64,
    /// HTree wire area per bit of link width per unit link length.
    pub htree_mm2_per_width: f64,
    /// Fraction of input bits that are 1 (drives DAC and crossbar activity).
    pub input_bit_density: f64,
    /// Tile area served by one chip's worth of HyperTransport links.
    pub chip_tile_area_mm2: f64,
    /// Bandwidth of the router port serving one tile.
    pub router_gbps: f64,
}

impl Default for ModelConstants {
    fn default() -> Self {
        ModelConstants {
            cycle_ns: 100.0,
            htree_pj_per_bit: 0.01,
            htree_mm2_per_width: 2.3e-5,
            input_bit_density: 0.5,
            chip_tile_area_mm2: 62.5,
            router_gbps: 32.0,
        }
    }
}

impl ModelConstants {
    pub fn cycle_s(&self) -> f64 {
        self.cycle_ns * 1e-9
    }

    /// Names and values of the constants that are assumptions rather than
    /// published component costs.
    pub fn assumptions(&self) -> Vec<(&'static str, f64)> {
        vec![
            ("htree_pj_per_bit", self.htree_pj_per_bit),
            ("htree_mm2_per_width", self.htree_mm2_per_width),
            ("input_bit_density", self.input_bit_density),
            ("chip_tile_area_mm2", self.chip_tile_area_mm2),
            ("router_gbps", self.router_gbps),
        ]
    }
}
