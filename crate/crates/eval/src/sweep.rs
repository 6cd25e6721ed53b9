use serde::Serialize;
use xbar_mapper::NetworkDesc;

use crate::{
    deltas, evaluate, run_each, Deltas, DesignPoint, EvalError, EvalReport, Execution, Result,
    SCHEMA_VERSION,
};

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct SweepAxis {
    pub key: String,
    pub values: Vec<String>,
}

/// Cartesian product of axes; the first axis varies slowest.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize)]
pub struct SweepGrid {
    pub axes: Vec<SweepAxis>,
}

impl SweepGrid {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn axis(mut self, key: &str, values: &[&str]) -> Self {
        self.axes.push(SweepAxis {
            key: key.to_string(),
            values: values.iter().map(|v| v.to_string()).collect(),
        });
        self
    }

    /// Parses `key=v1,v2,...`.
    pub fn parse_axis(spec: &str) -> Result<SweepAxis> {
        let (key, values) = spec
            .split_once('=')
            .ok_or_else(|| EvalError::Grid(format!("`{spec}` is not key=v1,v2,...")))?;
        let key = key.trim();
        let values: Vec<String> = values.split(',').map(|v| v.trim().to_string()).collect();
        if key.is_empty() || values.iter().any(String::is_empty) {
            return Err(EvalError::Grid(format!(
                "`{spec}` has an empty key or value"
            )));
        }
        Ok(SweepAxis {
            key: key.to_string(),
            values,
        })
    }

    pub fn len(&self) -> usize {
        self.axes.iter().map(|a| a.values.len()).product()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Every combination of settings, in deterministic order.
    pub fn combinations(&self) -> Vec<Vec<(String, String)>> {
        let mut out = vec![Vec::new()];
        for axis in &self.axes {
            out = out
                .into_iter()
                .flat_map(|prefix| {
                    axis.values.iter().map(move |v| {
                        let mut p = prefix.clone();
                        p.push((axis.key.clone(), v.clone()));
                        p
                    })
                })
                .collect();
        }
        out
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SweepPoint {
    pub label: String,
    pub settings: Vec<(String, String)>,
    /// Suite means.
    pub ce_gops_per_mm2: f64,
    pub pe_gops_per_w: f64,
    pub peak_power_w: f64,
    pub area_mm2: f64,
    pub energy_per_op_pj: f64,
    pub latency_s: f64,
    /// Suite-mean change relative to the unmodified base point.
    pub versus_base: Deltas,
    /// Non-dominated layer on (CE, PE); 0 is the Pareto front.
    pub pareto_rank: usize,
    pub reports: Vec<EvalReport>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SweepResult {
    pub schema_version: u32,
    pub base: String,
    pub grid: SweepGrid,
    /// Grid order.
    pub points: Vec<SweepPoint>,
    /// Indices into `points` on the Pareto front, by descending CE.
    pub pareto_front: Vec<usize>,
}

fn dominates(a: (f64, f64), b: (f64, f64)) -> bool {
    a.0 >= b.0 && a.1 >= b.1 && (a.0 > b.0 || a.1 > b.1)
}

fn pareto_ranks(scores: &[(f64, f64)]) -> Vec<usize> {
    let mut rank = vec![usize::MAX; scores.len()];
    let mut level = 0;
    while rank.contains(&usize::MAX) {
        let layer: Vec<usize> = (0..scores.len())
            .filter(|&i| rank[i] == usize::MAX)
            .filter(|&i| {
                !(0..scores.len()).any(|j| rank[j] == usize::MAX && dominates(scores[j], scores[i]))
            })
            .collect();
        for i in layer {
            rank[i] = level;
        }
        level += 1;
    }
    rank
}

fn mean(reports: &[EvalReport], f: fn(&EvalReport) -> f64) -> f64 {
    reports.iter().map(f).sum::<f64>() / reports.len() as f64
}

pub fn sweep(base: &DesignPoint, grid: &SweepGrid, nets: &[NetworkDesc]) -> Result<SweepResult> {
    sweep_with(base, grid, nets, Execution::default())
}

/// Evaluates every grid point on every network. Results do not depend on
/// `exec`.
pub fn sweep_with(
    base: &DesignPoint,
    grid: &SweepGrid,
    nets: &[NetworkDesc],
    exec: Execution,
) -> Result<SweepResult> {
    if nets.is_empty() {
        return Err(EvalError::EmptySuite);
    }
    if grid.is_empty() {
        return Err(EvalError::Grid("an axis has no values".into()));
    }
    let mut points = Vec::with_capacity(grid.len() + 1);
    points.push(base.clone());
    for combo in grid.combinations() {
        let mut p = base.clone();
        for (k, v) in &combo {
            p = p.with(k, v)?;
        }
        points.push(p);
    }
    let jobs: Vec<(usize, usize)> = (0..points.len())
        .flat_map(|p| (0..nets.len()).map(move |n| (p, n)))
        .collect();
    let reports = run_each(exec, &jobs, |&(p, n)| evaluate(&nets[n], &points[p]))?;
    let mut chunks = reports.chunks(nets.len());
    let base_reports = chunks.next().expect("base point is always evaluated");

    let mut out: Vec<SweepPoint> = points[1..]
        .iter()
        .zip(chunks)
        .map(|(p, rs)| {
            let d: Vec<Deltas> = base_reports
                .iter()
                .zip(rs)
                .map(|(b, c)| deltas(b, c))
                .collect();
            SweepPoint {
                label: p.label.clone(),
                settings: p.settings.clone(),
                ce_gops_per_mm2: mean(rs, |r| r.ce_gops_per_mm2),
                pe_gops_per_w: mean(rs, |r| r.pe_gops_per_w),
                peak_power_w: mean(rs, |r| r.peak_power_w),
                area_mm2: mean(rs, |r| r.area_mm2),
                energy_per_op_pj: mean(rs, |r| r.energy_per_op_pj),
                latency_s: mean(rs, |r| r.latency_s),
                versus_base: Deltas::mean(&d),
                pareto_rank: 0,
                reports: rs.to_vec(),
            }
        })
        .collect();
    let scores: Vec<(f64, f64)> = out
        .iter()
        .map(|p| (p.ce_gops_per_mm2, p.pe_gops_per_w))
        .collect();
    for (p, r) in out.iter_mut().zip(pareto_ranks(&scores)) {
        p.pareto_rank = r;
    }
    let mut pareto_front: Vec<usize> = (0..out.len())
        .filter(|&i| out[i].pareto_rank == 0)
        .collect();
    pareto_front.sort_by(|&a, &b| scores[b].0.total_cmp(&scores[a].0).then(a.cmp(&b)));
    Ok(SweepResult {
        schema_version: SCHEMA_VERSION,
        base: base.label.clone(),
        grid: grid.clone(),
        points: out,
        pareto_front,
    })
}
