use crate::{full_grid, AdcCell, AdcError, AdcGrid, Result};

/// How capacitive-DAC energy depends on which bits are resolved.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum CdacModel {
    /// Proportional to the number of resolved bits.
    #[default]
    Linear,
    /// Proportional to the binary weight of the resolved bit positions,
    /// so dropping high-order bits saves more than dropping low-order ones.
    BinaryWeighted,
}

/// Power of a SAR ADC split into gateable components plus the sampling clock.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AdcPowerModel {
    pub base_power_mw: f64,
    pub base_rate_sps: f64,
    pub cdac: f64,
    pub digital: f64,
    pub analog_other: f64,
    pub sampling_clock: f64,
    pub cdac_model: CdacModel,
    /// Data encoding that saves one comparator decision per conversion.
    pub encoding_saving: bool,
}

impl Default for AdcPowerModel {
    fn default() -> Self {
        Self::with_cdac_fraction(1.0 / 3.0)
    }
}

impl AdcPowerModel {
    pub const SAMPLING_CLOCK_FRACTION: f64 = 0.1;

    /// 3.1 mW at 1.2 GS/s with the given CDAC share; the remaining gateable
    /// power is split evenly between digital logic and other analog parts.
    pub fn with_cdac_fraction(cdac: f64) -> Self {
        let rest = (1.0 - cdac - Self::SAMPLING_CLOCK_FRACTION) / 2.0;
        AdcPowerModel {
            base_power_mw: 3.1,
            base_rate_sps: 1.2e9,
            cdac,
            digital: rest,
            analog_other: rest,
            sampling_clock: Self::SAMPLING_CLOCK_FRACTION,
            cdac_model: CdacModel::Linear,
            encoding_saving: false,
        }
    }

    pub fn validate(&self) -> Result<()> {
        let parts = [
            self.cdac,
            self.digital,
            self.analog_other,
            self.sampling_clock,
        ];
        if parts.iter().any(|&p| !(0.0..=1.0).contains(&p)) {
            return Err(AdcError::PowerModel("fractions must lie in [0, 1]".into()));
        }
        if (parts.iter().sum::<f64>() - 1.0).abs() > 1e-9 {
            return Err(AdcError::PowerModel("fractions must sum to 1".into()));
        }
        if self.base_power_mw <= 0.0 || self.base_rate_sps <= 0.0 {
            return Err(AdcError::PowerModel(
                "power and rate must be positive".into(),
            ));
        }
        Ok(())
    }

    /// Power at `rate_sps`, scaled linearly from the base operating point.
    pub fn power_mw_at(&self, rate_sps: f64) -> f64 {
        self.base_power_mw * rate_sps / self.base_rate_sps
    }

    /// Energy of one conversion of `cell`, as a fraction of a full-resolution
    /// conversion.
    pub fn conversion_weight(&self, cell: &AdcCell, grid: &AdcGrid) -> f64 {
        let mut n = cell.resolved_bits();
        if n == 0 {
            return 0.0;
        }
        if self.encoding_saving {
            n -= 1;
        }
        let sb = grid.sample_bits as f64;
        let gateable_linear = self.digital + self.analog_other;
        let cdac = match self.cdac_model {
            CdacModel::Linear => self.cdac * n as f64 / sb,
            CdacModel::BinaryWeighted => {
                let local = cell.start_bit.saturating_sub(cell.shift);
                let mut weight: u64 = (0..cell.kept_bits).map(|b| 1u64 << (local + b)).sum();
                if cell.clamp_test {
                    let above = (cell.start_bit + cell.kept_bits).saturating_sub(cell.shift);
                    weight += 1u64 << above.min(grid.sample_bits - 1);
                }
                self.cdac * weight as f64 / ((1u64 << grid.sample_bits) - 1) as f64
            }
        };
        self.sampling_clock + gateable_linear * n as f64 / sb + cdac
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WindowEnergy {
    pub joules: f64,
    pub conversions: usize,
    /// Conversions that resolve at least one bit.
    pub active_conversions: usize,
    /// Σ conversion weights, in units of one full-resolution conversion.
    pub full_equivalents: f64,
}

/// ADC energy for one dot-product window through `grid`.
pub fn adc_energy(grid: &AdcGrid, model: &AdcPowerModel, sampling_rate_sps: f64) -> WindowEnergy {
    let full_equivalents: f64 = grid
        .cells
        .iter()
        .map(|c| model.conversion_weight(c, grid))
        .sum();
    let per_conversion = model.power_mw_at(sampling_rate_sps) * 1e-3 / sampling_rate_sps;
    WindowEnergy {
        joules: full_equivalents * per_conversion,
        conversions: grid.cells.len(),
        active_conversions: grid.cells.iter().filter(|c| c.resolved_bits() > 0).count(),
        full_equivalents,
    }
}

/// Window energy of `grid` relative to the plain full-resolution pipeline.
pub fn relative_energy(grid: &AdcGrid, model: &AdcPowerModel) -> f64 {
    let rate = model.base_rate_sps;
    adc_energy(grid, model, rate).joules / adc_energy(&full_grid(0), model, rate).joules
}
