use serde::Serialize;
use xbar_arch::{Breakdown, Component, Toggles};

use crate::{
    Attribution, Comparison, Deltas, EvalReport, Result, SweepResult, VerifyReport, SCHEMA_VERSION,
};

/// Pretty JSON with a trailing newline.
pub fn to_json<T: Serialize>(value: &T) -> Result<String> {
    let mut s = serde_json::to_string_pretty(value)?;
    s.push('\n');
    Ok(s)
}

struct Table {
    header: Vec<String>,
    rows: Vec<Vec<String>>,
}

impl Table {
    fn new<S: ToString>(cols: impl IntoIterator<Item = S>) -> Self {
        let mut header = vec!["schema_version".to_string()];
        header.extend(cols.into_iter().map(|c| c.to_string()));
        Table {
            header,
            rows: Vec::new(),
        }
    }

    fn push(&mut self, cells: Vec<String>) {
        let mut row = vec![SCHEMA_VERSION.to_string()];
        row.extend(cells);
        debug_assert_eq!(row.len(), self.header.len());
        self.rows.push(row);
    }

    fn finish(self) -> Result<String> {
        let mut w = csv::Writer::from_writer(Vec::new());
        w.write_record(&self.header)?;
        for r in &self.rows {
            w.write_record(r)?;
        }
        let bytes = w
            .into_inner()
            .map_err(|e| crate::EvalError::Encode(e.to_string()))?;
        Ok(String::from_utf8(bytes).expect("csv output is UTF-8"))
    }
}

fn num(v: f64) -> String {
    format!("{v}")
}

fn breakdown_cols(prefix: &str) -> Vec<String> {
    Component::ALL
        .iter()
        .map(|c| format!("{prefix}_{}", c.name()))
        .collect()
}

fn breakdown_cells(b: &Breakdown) -> Vec<String> {
    Component::ALL.iter().map(|&c| num(b.get(c))).collect()
}

const TOGGLE_COLS: [&str; 9] = [
    "compact_htree",
    "adaptive_adc",
    "guard_bits",
    "karatsuba_level",
    "strassen",
    "spread_buffers",
    "fc_tiles",
    "fc_slowdown",
    "fc_adc_share",
];

fn toggle_cells(t: &Toggles) -> Vec<String> {
    vec![
        t.compact_htree.to_string(),
        t.adaptive_adc.to_string(),
        t.guard_bits.to_string(),
        t.karatsuba_level.to_string(),
        t.strassen.to_string(),
        t.spread_buffers.to_string(),
        t.fc_tiles.to_string(),
        t.fc_slowdown.to_string(),
        t.fc_adc_share.to_string(),
    ]
}

const REPORT_COLS: [&str; 22] = [
    "network",
    "design",
    "latency_s",
    "throughput_images_per_s",
    "energy_per_image_j",
    "energy_per_op_pj",
    "ops_per_image",
    "peak_power_w",
    "area_mm2",
    "ce_gops_per_mm2",
    "pe_gops_per_w",
    "conv_imas",
    "fc_imas",
    "chips",
    "window_s",
    "pipeline_interval_s",
    "binding_constraint",
    "fc_keeps_pace",
    "adc_power_share",
    "max_tile_buffer_bytes",
    "weight_preload_s",
    "exact_numerics",
];

fn report_cells(r: &EvalReport) -> Vec<String> {
    let mut v = vec![
        r.network.clone(),
        r.design.clone(),
        num(r.latency_s),
        num(r.throughput_images_per_s),
        num(r.energy_per_image_j),
        num(r.energy_per_op_pj),
        num(r.ops_per_image),
        num(r.peak_power_w),
        num(r.area_mm2),
        num(r.ce_gops_per_mm2),
        num(r.pe_gops_per_w),
        r.conv_imas.to_string(),
        r.fc_imas.to_string(),
        num(r.chips),
        num(r.window_s),
        num(r.pipeline_interval_s),
        r.binding_constraint.clone(),
        r.fc_keeps_pace.to_string(),
        num(r.adc_power_share),
        num(r.max_tile_buffer_bytes),
        num(r.weight_preload_s),
        r.exact_numerics.to_string(),
    ];
    v.extend(toggle_cells(&r.toggles));
    v.extend(breakdown_cells(&r.energy_j));
    v.extend(breakdown_cells(&r.peak_power_mw));
    v.extend(breakdown_cells(&r.area_breakdown_mm2));
    v
}

fn report_header() -> Vec<String> {
    let mut h: Vec<String> = REPORT_COLS.iter().map(|s| s.to_string()).collect();
    h.extend(TOGGLE_COLS.iter().map(|s| s.to_string()));
    h.extend(breakdown_cols("energy_j"));
    h.extend(breakdown_cols("peak_power_mw"));
    h.extend(breakdown_cols("area_mm2"));
    h
}

/// One row per report, with per-component energy, power and area columns.
pub fn reports_csv(reports: &[EvalReport]) -> Result<String> {
    let mut t = Table::new(report_header());
    for r in reports {
        t.push(report_cells(r));
    }
    t.finish()
}

const DELTA_COLS: [&str; 7] = [
    "power_reduction",
    "peak_power_reduction",
    "energy_efficiency_gain",
    "throughput_per_area_ratio",
    "area_efficiency_gain",
    "area_reduction",
    "latency_ratio",
];

fn delta_cells(d: &Deltas) -> Vec<String> {
    [
        d.power_reduction,
        d.peak_power_reduction,
        d.energy_efficiency_gain,
        d.throughput_per_area_ratio,
        d.area_efficiency_gain,
        d.area_reduction,
        d.latency_ratio,
    ]
    .into_iter()
    .map(num)
    .collect()
}

/// One row per network plus a `mean` row; baseline and candidate
/// peak-power breakdowns are attached to the network rows.
pub fn comparison_csv(c: &Comparison) -> Result<String> {
    let mut cols: Vec<String> = ["baseline", "candidate", "network"]
        .iter()
        .chain(DELTA_COLS.iter())
        .map(|s| s.to_string())
        .collect();
    cols.extend(breakdown_cols("baseline_peak_power_mw"));
    cols.extend(breakdown_cols("candidate_peak_power_mw"));
    let mut t = Table::new(cols);
    for (i, d) in c.networks.iter().enumerate() {
        let mut row = vec![c.baseline.clone(), c.candidate.clone(), d.network.clone()];
        row.extend(delta_cells(d));
        row.extend(breakdown_cells(&c.baseline_reports[i].peak_power_mw));
        row.extend(breakdown_cells(&c.candidate_reports[i].peak_power_mw));
        t.push(row);
    }
    let mut row = vec![c.baseline.clone(), c.candidate.clone(), "mean".into()];
    row.extend(delta_cells(&c.mean));
    row.extend(std::iter::repeat(String::new()).take(2 * Component::ALL.len()));
    t.push(row);
    t.finish()
}

/// One row per optimization step with its suite-mean effect.
pub fn attribution_csv(a: &Attribution) -> Result<String> {
    let cols = [
        "step",
        "key",
        "value",
        "strassen_covered_imas",
        "strassen_freed_imas",
    ]
    .into_iter()
    .chain(DELTA_COLS);
    let mut t = Table::new(cols);
    for (i, s) in a.steps.iter().enumerate() {
        let mut row = vec![
            (i + 1).to_string(),
            s.key.clone(),
            s.value.clone(),
            s.strassen_covered_imas.to_string(),
            s.strassen_freed_imas.to_string(),
        ];
        row.extend(delta_cells(&s.comparison.mean));
        t.push(row);
    }
    t.finish()
}

/// One row per grid point with suite means and the change versus the base.
pub fn sweep_csv(s: &SweepResult) -> Result<String> {
    let mut cols: Vec<String> = vec!["label".into()];
    cols.extend(s.grid.axes.iter().map(|a| a.key.clone()));
    cols.extend(
        [
            "ce_gops_per_mm2",
            "pe_gops_per_w",
            "peak_power_w",
            "area_mm2",
            "energy_per_op_pj",
            "latency_s",
            "pareto_rank",
        ]
        .map(String::from),
    );
    cols.extend(DELTA_COLS.map(String::from));
    let mut t = Table::new(cols);
    for p in &s.points {
        let mut row = vec![p.label.clone()];
        row.extend(p.settings.iter().map(|(_, v)| v.clone()));
        row.extend([
            num(p.ce_gops_per_mm2),
            num(p.pe_gops_per_w),
            num(p.peak_power_w),
            num(p.area_mm2),
            num(p.energy_per_op_pj),
            num(p.latency_s),
            p.pareto_rank.to_string(),
        ]);
        row.extend(delta_cells(&p.versus_base));
        t.push(row);
    }
    t.finish()
}

pub fn verify_csv(v: &VerifyReport) -> Result<String> {
    let mut t = Table::new(["seed", "suite", "cases", "failures", "passed"]);
    for s in &v.suites {
        t.push(vec![
            v.seed.to_string(),
            s.name.clone(),
            s.cases.to_string(),
            s.failures.to_string(),
            s.passed().to_string(),
        ]);
    }
    t.finish()
}
