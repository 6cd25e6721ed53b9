use crate::{ArchError, Result};

/// Write-precision parameters bounding how many crossbar rows may be
/// driven at once.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NoiseParams {
    pub rrange: f64,
    pub delta_r: f64,
    pub levels: f64,
}

/// floor(rrange / (levels · delta_r)).
pub fn active_rows(noise: &NoiseParams) -> Result<u64> {
    let NoiseParams {
        rrange,
        delta_r,
        levels,
    } = *noise;
    if !(rrange > 0.0 && delta_r > 0.0 && levels > 0.0) {
        return Err(ArchError::Invalid(
            "noise parameters must be positive".into(),
        ));
    }
    Ok((rrange / (levels * delta_r) + 1e-9).floor() as u64)
}
