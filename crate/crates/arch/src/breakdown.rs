use std::collections::BTreeMap;
use std::fmt;

use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Component {
    Adc,
    Dac,
    Crossbar,
    Htree,
    Registers,
    KaratsubaAdders,
    StrassenAdders,
    Edram,
    Bus,
    Router,
    SigmoidPool,
    HyperTransport,
}

impl Component {
    pub const ALL: [Component; 12] = [
        Component::Adc,
        Component::Dac,
        Component::Crossbar,
        Component::Htree,
        Component::Registers,
        Component::KaratsubaAdders,
        Component::StrassenAdders,
        Component::Edram,
        Component::Bus,
        Component::Router,
        Component::SigmoidPool,
        Component::HyperTransport,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Component::Adc => "adc",
            Component::Dac => "dac",
            Component::Crossbar => "crossbar",
            Component::Htree => "htree",
            Component::Registers => "registers",
            Component::KaratsubaAdders => "karatsuba_adders",
            Component::StrassenAdders => "strassen_adders",
            Component::Edram => "edram",
            Component::Bus => "bus",
            Component::Router => "router",
            Component::SigmoidPool => "sigmoid_pool",
            Component::HyperTransport => "hyper_transport",
        }
    }
}

impl fmt::Display for Component {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// Per-component quantities (power, area or energy), ordered by component.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Breakdown(pub BTreeMap<Component, f64>);

impl Breakdown {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn add(&mut self, c: Component, v: f64) {
        *self.0.entry(c).or_insert(0.0) += v;
    }

    pub fn get(&self, c: Component) -> f64 {
        self.0.get(&c).copied().unwrap_or(0.0)
    }

    pub fn total(&self) -> f64 {
        self.0.values().sum()
    }

    pub fn scaled(&self, k: f64) -> Breakdown {
        Breakdown(self.0.iter().map(|(&c, &v)| (c, v * k)).collect())
    }

    pub fn merge(&mut self, other: &Breakdown) {
        for (&c, &v) in &other.0 {
            self.add(c, v);
        }
    }

    pub fn share(&self, c: Component) -> f64 {
        let t = self.total();
        if t == 0.0 {
            0.0
        } else {
            self.get(c) / t
        }
    }

    pub fn iter(&self) -> impl Iterator<Item = (Component, f64)> + '_ {
        self.0.iter().map(|(&c, &v)| (c, v))
    }
}
