use serde::{Deserialize, Serialize};
use xbar_arch::ImaConfig;

use crate::{LayerInstance, LayerKind, MapperError, NetworkDesc, Result};

/// How a layer's weight matrix lands on IMAs and crossbars.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LayerFold {
    pub rows: u64,
    pub cols: u64,
    pub row_blocks: u64,
    pub col_blocks: u64,
    pub ima_count: u64,
    pub crossbars_per_ima: u64,
    pub crossbar_count: u64,
    /// Crossbars holding at least one weight cell.
    pub occupied_crossbars: u64,
    pub cell_utilization: f64,
    pub crossbar_utilization: f64,
}

fn slices(ima: &ImaConfig) -> u64 {
    let groups = ima.max_inputs.div_ceil(ima.xbar_rows) * ima.outputs.div_ceil(ima.xbar_cols);
    (ima.base_crossbars / groups.max(1)).max(1) as u64
}

/// Crossbar groups touched by `n` items split into blocks of `block`, each
/// block cut into crossbars of `unit`.
fn touched(n: u64, block: u64, unit: u64) -> u64 {
    let full = n / block;
    let rem = n % block;
    full * block.div_ceil(unit) + rem.div_ceil(unit)
}

/// Folds a `(Kx·Ky·Ni) × No` weight matrix onto IMAs with `ima.max_inputs`
/// rows and `ima.outputs` columns each.
pub fn crossbars_for_layer(layer: &LayerInstance, ima: &ImaConfig) -> LayerFold {
    let rows = layer.weight_rows();
    let cols = layer.no as u64;
    let (ir, ic) = (ima.max_inputs as u64, ima.outputs as u64);
    let (xr, xc) = (ima.xbar_rows as u64, ima.xbar_cols as u64);
    let s = slices(ima);
    let row_blocks = rows.div_ceil(ir);
    let col_blocks = cols.div_ceil(ic);
    let ima_count = row_blocks * col_blocks;
    let crossbars_per_ima = ir.div_ceil(xr) * ic.div_ceil(xc) * s;
    let crossbar_count = ima_count * crossbars_per_ima;
    let occupied = touched(rows, ir, xr) * touched(cols, ic, xc) * s;
    let cells = (crossbar_count * xr * xc) as f64;
    LayerFold {
        rows,
        cols,
        row_blocks,
        col_blocks,
        ima_count,
        crossbars_per_ima,
        crossbar_count,
        occupied_crossbars: occupied,
        cell_utilization: (rows * cols * s) as f64 / cells,
        crossbar_utilization: occupied as f64 / crossbar_count as f64,
    }
}

/// Replication of every expanded layer: `ceil(steps / min_steps)` for conv
/// layers, where `min_steps` is the smallest conv output, and 1 otherwise.
pub fn replication_factors(net: &NetworkDesc) -> Result<Vec<u32>> {
    let inst = net.instances();
    let min_steps = inst
        .iter()
        .filter(|l| l.kind == LayerKind::Conv)
        .map(LayerInstance::steps)
        .min()
        .ok_or_else(|| MapperError::NoConv(net.name.clone()))?;
    Ok(inst
        .iter()
        .map(|l| match l.kind {
            LayerKind::Conv => l.steps().div_ceil(min_steps) as u32,
            _ => 1,
        })
        .collect())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BufferMode {
    /// Every tile hosting part of a layer buffers the whole layer input.
    Naive,
    /// Input rows are divided among the tiles hosting the layer.
    Spread,
}

/// Steady-state input buffer of one layer, in bytes per hosting tile.
///
/// Sliding-window layers keep `ceil((Ky−1)/stride)` input rows plus `Kx`
/// pixels of every input channel; FC layers hold their input vector once,
/// since each input is discarded as soon as every neuron has seen it.
pub fn buffer_requirement(layer: &LayerInstance, mode: BufferMode, tiles_sharing: usize) -> f64 {
    let bytes = match layer.kind {
        LayerKind::Conv | LayerKind::Pool => {
            let rows = (layer.ky as u64 - 1).div_ceil(layer.stride as u64);
            (rows * layer.input_w as u64 + layer.kx as u64) * layer.ni as u64 * 2
        }
        LayerKind::Fc => layer.ni as u64 * 2,
        LayerKind::Spp | LayerKind::GlobalPool => layer.no as u64 * 2,
    } as f64;
    match mode {
        BufferMode::Naive => bytes,
        BufferMode::Spread => bytes / tiles_sharing.max(1) as f64,
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Granularity {
    /// Unused weight cells inside allocated crossbars.
    Cell,
    /// Allocated crossbars that hold no weights at all.
    Crossbar,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct UnderUtilization {
    pub granularity: Granularity,
    pub per_network: Vec<(String, f64)>,
    pub mean: f64,
}

/// Suite mean of each network's unused fraction, weighted by crossbar count
/// (replicas included).
pub fn suite_underutilization(
    nets: &[NetworkDesc],
    ima: &ImaConfig,
    granularity: Granularity,
) -> Result<UnderUtilization> {
    let mut per_network = Vec::with_capacity(nets.len());
    for net in nets {
        let reps = replication_factors(net)?;
        let (mut used, mut alloc) = (0.0, 0.0);
        for l in net.instances().iter().filter(|l| l.kind.is_compute()) {
            let f = crossbars_for_layer(l, ima);
            let r = reps[l.index] as f64;
            let u = match granularity {
                Granularity::Cell => f.cell_utilization,
                Granularity::Crossbar => f.crossbar_utilization,
            };
            used += u * f.crossbar_count as f64 * r;
            alloc += f.crossbar_count as f64 * r;
        }
        per_network.push((net.name.clone(), 1.0 - used / alloc));
    }
    let mean = per_network.iter().map(|(_, v)| v).sum::<f64>() / per_network.len().max(1) as f64;
    Ok(UnderUtilization {
        granularity,
        per_network,
        mean,
    })
}
