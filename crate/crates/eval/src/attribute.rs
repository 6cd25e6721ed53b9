use serde::Serialize;
use xbar_mapper::NetworkDesc;

use crate::{compare, Comparison, DesignPoint, Result, SCHEMA_VERSION};

/// Optimizations in the order they are stacked onto the baseline.
pub const DEFAULT_STEPS: [(&str, &str); 6] = [
    ("compact_htree", "true"),
    ("adaptive_adc", "true"),
    ("karatsuba_level", "1"),
    ("spread_buffers", "true"),
    ("fc_tiles", "true"),
    ("strassen", "true"),
];

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AttributionStep {
    pub key: String,
    pub value: String,
    /// Previous point versus the point with this step added.
    pub comparison: Comparison,
    pub strassen_covered_imas: usize,
    pub strassen_freed_imas: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Attribution {
    pub schema_version: u32,
    pub start: String,
    pub steps: Vec<AttributionStep>,
}

impl Attribution {
    pub fn step(&self, key: &str) -> Option<&AttributionStep> {
        self.steps.iter().find(|s| s.key == key)
    }
}

/// Applies `steps` one at a time on top of `start` and records each
/// increment's suite-mean effect.
pub fn attribute(
    start: &DesignPoint,
    steps: &[(&str, &str)],
    nets: &[NetworkDesc],
) -> Result<Attribution> {
    let mut cur = start.clone();
    let mut out = Vec::with_capacity(steps.len());
    for &(key, value) in steps {
        let next = cur.with(key, value)?;
        let comparison = compare(&cur, &next, nets)?;
        let (covered, freed) = comparison
            .candidate_reports
            .iter()
            .fold((0, 0), |(c, f), r| {
                (c + r.strassen_covered_imas, f + r.strassen_freed_imas)
            });
        out.push(AttributionStep {
            key: key.to_string(),
            value: value.to_string(),
            comparison,
            strassen_covered_imas: covered,
            strassen_freed_imas: freed,
        });
        cur = next;
    }
    Ok(Attribution {
        schema_version: SCHEMA_VERSION,
        start: start.label.clone(),
        steps: out,
    })
}
