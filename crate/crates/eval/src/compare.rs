use serde::Serialize;
use xbar_mapper::NetworkDesc;

use crate::{
    evaluate, run_each, DesignPoint, EvalError, EvalReport, Execution, Result, SCHEMA_VERSION,
};

/// Relative change from a baseline report to a candidate report. Every
/// "reduction" or "gain" is `1 - candidate/baseline` of a cost per unit of
/// work, so positive numbers mean the candidate is better.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Deltas {
    pub network: String,
    /// Peak power per unit throughput.
    pub power_reduction: f64,
    pub peak_power_reduction: f64,
    /// Energy per operation.
    pub energy_efficiency_gain: f64,
    pub throughput_per_area_ratio: f64,
    /// Area per unit throughput; negative values are an area cost.
    pub area_efficiency_gain: f64,
    pub area_reduction: f64,
    pub latency_ratio: f64,
}

pub fn deltas(base: &EvalReport, cand: &EvalReport) -> Deltas {
    let cost_power = |r: &EvalReport| r.peak_power_w / r.throughput_images_per_s;
    let ta = cand.throughput_per_area() / base.throughput_per_area();
    Deltas {
        network: cand.network.clone(),
        power_reduction: 1.0 - cost_power(cand) / cost_power(base),
        peak_power_reduction: 1.0 - cand.peak_power_w / base.peak_power_w,
        energy_efficiency_gain: 1.0 - cand.energy_per_op_pj / base.energy_per_op_pj,
        throughput_per_area_ratio: ta,
        area_efficiency_gain: 1.0 - 1.0 / ta,
        area_reduction: 1.0 - cand.area_mm2 / base.area_mm2,
        latency_ratio: cand.latency_s / base.latency_s,
    }
}

impl Deltas {
    /// Arithmetic mean of each field across networks.
    pub fn mean(all: &[Deltas]) -> Deltas {
        let n = all.len().max(1) as f64;
        let avg = |f: fn(&Deltas) -> f64| all.iter().map(f).sum::<f64>() / n;
        Deltas {
            network: "mean".into(),
            power_reduction: avg(|d| d.power_reduction),
            peak_power_reduction: avg(|d| d.peak_power_reduction),
            energy_efficiency_gain: avg(|d| d.energy_efficiency_gain),
            throughput_per_area_ratio: avg(|d| d.throughput_per_area_ratio),
            area_efficiency_gain: avg(|d| d.area_efficiency_gain),
            area_reduction: avg(|d| d.area_reduction),
            latency_ratio: avg(|d| d.latency_ratio),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Comparison {
    pub schema_version: u32,
    pub baseline: String,
    pub candidate: String,
    pub networks: Vec<Deltas>,
    pub mean: Deltas,
    pub baseline_reports: Vec<EvalReport>,
    pub candidate_reports: Vec<EvalReport>,
}

/// Evaluates every network on one point, keeping the input order.
pub fn evaluate_suite(point: &DesignPoint, nets: &[NetworkDesc]) -> Result<Vec<EvalReport>> {
    if nets.is_empty() {
        return Err(EvalError::EmptySuite);
    }
    run_each(Execution::default(), nets, |n| evaluate(n, point))
}

pub fn compare(
    baseline: &DesignPoint,
    candidate: &DesignPoint,
    nets: &[NetworkDesc],
) -> Result<Comparison> {
    let base = evaluate_suite(baseline, nets)?;
    let cand = evaluate_suite(candidate, nets)?;
    let networks: Vec<Deltas> = base.iter().zip(&cand).map(|(b, c)| deltas(b, c)).collect();
    Ok(Comparison {
        schema_version: SCHEMA_VERSION,
        baseline: baseline.label.clone(),
        candidate: candidate.label.clone(),
        mean: Deltas::mean(&networks),
        networks,
        baseline_reports: base,
        candidate_reports: cand,
    })
}
