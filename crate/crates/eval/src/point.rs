use serde::Serialize;
use xbar_arch::ArchConfig;

use crate::Result;

/// An architecture plus the settings that distinguish it in a study.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DesignPoint {
    pub label: String,
    /// `key=value` overrides applied on top of the base architecture.
    pub settings: Vec<(String, String)>,
    #[serde(skip)]
    pub arch: ArchConfig,
}

impl DesignPoint {
    pub fn new(arch: ArchConfig) -> Self {
        DesignPoint {
            label: arch.name.clone(),
            settings: Vec::new(),
            arch,
        }
    }

    pub fn baseline() -> Self {
        Self::new(ArchConfig::isaac_like())
    }

    pub fn newton() -> Self {
        Self::new(ArchConfig::newton())
    }

    /// Copy with one more override; the label records it.
    pub fn with(&self, key: &str, value: &str) -> Result<Self> {
        let mut arch = self.arch.clone();
        arch.set(key, value)?;
        let mut settings = self.settings.clone();
        settings.push((key.to_string(), value.to_string()));
        let label = settings
            .iter()
            .map(|(k, v)| format!("{k}={v}"))
            .collect::<Vec<_>>()
            .join(",");
        Ok(DesignPoint {
            label: format!("{}[{label}]", self.arch.name),
            settings,
            arch,
        })
    }
}
