use serde::Serialize;
use xbar_arch::{ArchConfig, ImaConfig, TileKind};
use xbar_numerics::PRODUCTS;

use crate::{
    buffer_requirement, crossbars_for_layer, replication_factors, BufferMode, LayerFold, LayerKind,
    MapperError, NetworkDesc, Result,
};

/// A run of consecutive IMA slots on one tile given to one layer.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Fragment {
    pub layer: usize,
    pub name: String,
    pub first_slot: usize,
    pub imas: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TilePlan {
    pub index: usize,
    pub kind: TileKind,
    pub fragments: Vec<Fragment>,
    pub imas_used: usize,
    pub buffer_bytes: f64,
    pub edram_bytes: f64,
    /// Buffer demand exceeds the tile's eDRAM.
    pub overflow: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LayerPlan {
    pub index: usize,
    pub name: String,
    pub kind: LayerKind,
    pub tile_kind: TileKind,
    pub fold: LayerFold,
    pub replication: u32,
    /// IMAs allocated after replication and Strassen freeing.
    pub ima_count: usize,
    pub crossbar_count: u64,
    pub strassen_covered: usize,
    pub strassen_freed: usize,
    pub steps: u64,
    /// Window positions each replica walks through per image.
    pub steps_per_replica: u64,
    pub tile_ids: Vec<usize>,
    /// Buffer this layer contributes (own input plus any pooling or skip
    /// inputs it feeds), before dividing among tiles.
    pub buffer_bytes: f64,
    /// Largest share of `buffer_bytes` any hosting tile carries.
    pub buffer_bytes_per_tile: f64,
    pub utilization: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MappingPlan {
    pub network: String,
    pub buffer_mode: BufferMode,
    pub imas_per_tile: usize,
    pub min_steps: u64,
    pub layers: Vec<LayerPlan>,
    pub tiles: Vec<TilePlan>,
    pub max_tile_buffer: f64,
    pub mean_tile_buffer: f64,
    pub overflow_tiles: Vec<usize>,
}

impl MappingPlan {
    pub fn imas(&self, kind: TileKind) -> usize {
        self.layers
            .iter()
            .filter(|l| l.tile_kind == kind)
            .map(|l| l.ima_count)
            .sum()
    }

    pub fn tile_count(&self, kind: TileKind) -> usize {
        self.tiles.iter().filter(|t| t.kind == kind).count()
    }

    pub fn total_crossbars(&self) -> u64 {
        self.layers.iter().map(|l| l.crossbar_count).sum()
    }

    pub fn strassen_freed(&self) -> usize {
        self.layers.iter().map(|l| l.strassen_freed).sum()
    }

    /// Checks the structural rules every plan must satisfy.
    pub fn check(&self, arch: &ArchConfig) -> std::result::Result<(), String> {
        for t in &self.tiles {
            if t.imas_used > self.imas_per_tile {
                return Err(format!("tile {} holds {} IMAs", t.index, t.imas_used));
            }
            let mut next = 0;
            for f in &t.fragments {
                if f.first_slot != next {
                    return Err(format!("tile {} has overlapping or gapped slots", t.index));
                }
                next += f.imas;
            }
            if next != t.imas_used {
                return Err(format!("tile {} slot count mismatch", t.index));
            }
        }
        for l in &self.layers {
            let placed: usize = self
                .tiles
                .iter()
                .flat_map(|t| &t.fragments)
                .filter(|f| f.layer == l.index)
                .map(|f| f.imas)
                .sum();
            if placed != l.ima_count {
                return Err(format!(
                    "{} placed {placed} of {} IMAs",
                    l.name, l.ima_count
                ));
            }
            let ima = ImaConfig::from_arch(arch, l.tile_kind);
            let per_block = l.fold.rows.div_ceil(l.fold.row_blocks);
            if per_block > ima.max_inputs as u64 {
                return Err(format!("{} feeds {per_block} inputs to one IMA", l.name));
            }
        }
        Ok(())
    }
}

/// IMAs a layer's quadrant groups cover, and how many of them Strassen
/// frees (one per eight).
fn strassen_savings(fold: &LayerFold, replication: u32) -> (usize, usize) {
    let block = (PRODUCTS + 1) as u64;
    let quads = 4 * (fold.row_blocks / 2) * (fold.col_blocks / 2) * replication as u64;
    let covered = quads / block * block;
    (covered as usize, (covered / block) as usize)
}

struct Filler {
    tiles: Vec<TilePlan>,
    open: [Option<usize>; 2],
    per_tile: usize,
}

impl Filler {
    fn place(
        &mut self,
        kind: TileKind,
        edram_bytes: f64,
        layer: usize,
        name: &str,
        mut imas: usize,
    ) -> Vec<usize> {
        let slot = kind as usize;
        let mut ids = Vec::new();
        while imas > 0 {
            let id = match self.open[slot] {
                Some(i) if self.tiles[i].imas_used < self.per_tile => i,
                _ => {
                    let i = self.tiles.len();
                    self.tiles.push(TilePlan {
                        index: i,
                        kind,
                        fragments: Vec::new(),
                        imas_used: 0,
                        buffer_bytes: 0.0,
                        edram_bytes,
                        overflow: false,
                    });
                    self.open[slot] = Some(i);
                    i
                }
            };
            let t = &mut self.tiles[id];
            let take = imas.min(self.per_tile - t.imas_used);
            t.fragments.push(Fragment {
                layer,
                name: name.to_string(),
                first_slot: t.imas_used,
                imas: take,
            });
            t.imas_used += take;
            imas -= take;
            ids.push(id);
        }
        ids
    }
}

/// Assigns every compute layer of `net` to IMAs and tiles of `arch`.
pub fn plan_network(net: &NetworkDesc, arch: &ArchConfig) -> Result<MappingPlan> {
    arch.validate()?;
    net.validate()?;
    let toggles = &arch.toggles;
    let mode = if toggles.spread_buffers {
        BufferMode::Spread
    } else {
        BufferMode::Naive
    };
    let per_tile = arch.chip.imas_per_tile;
    let inst = net.instances();
    let reps = replication_factors(net)?;
    let min_steps = inst
        .iter()
        .filter(|l| l.kind == LayerKind::Conv)
        .map(|l| l.steps())
        .min()
        .unwrap_or(1);

    let mut filler = Filler {
        tiles: Vec::new(),
        open: [None, None],
        per_tile,
    };
    let mut layers = Vec::new();
    // Buffers charged to each compute layer: its own input plus the
    // pooling stages that feed it.
    let mut charges: Vec<f64> = Vec::new();
    let mut pending = 0.0;
    let mut owner = vec![None; inst.len()];

    for l in &inst {
        if !l.kind.is_compute() {
            pending += buffer_requirement(l, BufferMode::Naive, 1);
            continue;
        }
        let tile_kind = if l.kind == LayerKind::Fc && toggles.fc_tiles {
            TileKind::Fc
        } else {
            TileKind::Conv
        };
        let ima = ImaConfig::from_arch(arch, tile_kind);
        let fold = crossbars_for_layer(l, &ima);
        let r = reps[l.index];
        let (covered, freed) = if toggles.strassen && l.kind == LayerKind::Conv {
            strassen_savings(&fold, r)
        } else {
            (0, 0)
        };
        let ima_count = fold.ima_count as usize * r as usize - freed;
        let edram = match tile_kind {
            TileKind::Fc => arch.memory.fc_edram_kb,
            TileKind::Conv => arch.conv_edram_kb(),
        } * 1024.0;
        let tile_ids = filler.place(tile_kind, edram, l.index, &l.name, ima_count);
        owner[l.index] = Some(layers.len());
        charges.push(buffer_requirement(l, BufferMode::Naive, 1) + pending);
        pending = 0.0;
        layers.push(LayerPlan {
            index: l.index,
            name: l.name.clone(),
            kind: l.kind,
            tile_kind,
            crossbar_count: ima_count as u64 * fold.crossbars_per_ima,
            utilization: fold.cell_utilization,
            fold,
            replication: r,
            ima_count,
            strassen_covered: covered,
            strassen_freed: freed,
            steps: l.steps(),
            steps_per_replica: l.steps().div_ceil(r as u64),
            tile_ids,
            buffer_bytes: 0.0,
            buffer_bytes_per_tile: 0.0,
        });
    }
    if layers.is_empty() {
        return Err(MapperError::NoConv(net.name.clone()));
    }
    if let Some(last) = charges.last_mut() {
        *last += pending;
    }
    for (from, to) in net.skip_edges() {
        if let Some(dst) = owner[to] {
            charges[dst] += buffer_requirement(&inst[from], BufferMode::Naive, 1);
        }
    }

    // Spread mode divides a layer's input rows among its fragments in
    // proportion to the IMAs each holds.
    for (lp, bytes) in layers.iter_mut().zip(charges) {
        let mut worst: f64 = 0.0;
        for &t in &lp.tile_ids {
            let tile = &mut filler.tiles[t];
            let imas: usize = tile
                .fragments
                .iter()
                .filter(|f| f.layer == lp.index)
                .map(|f| f.imas)
                .sum();
            let share = match mode {
                BufferMode::Naive => bytes,
                BufferMode::Spread => bytes * imas as f64 / lp.ima_count as f64,
            };
            tile.buffer_bytes += share;
            worst = worst.max(share);
        }
        lp.buffer_bytes = bytes;
        lp.buffer_bytes_per_tile = worst;
    }

    let mut tiles = filler.tiles;
    let mut overflow_tiles = Vec::new();
    for t in &mut tiles {
        t.overflow = t.buffer_bytes > t.edram_bytes;
        if t.overflow {
            overflow_tiles.push(t.index);
        }
    }
    if arch.chip.max_tiles > 0 && tiles.len() > arch.chip.max_tiles {
        return Err(MapperError::Capacity {
            needed: tiles.len(),
            available: arch.chip.max_tiles,
        });
    }
    let max_tile_buffer = tiles.iter().map(|t| t.buffer_bytes).fold(0.0, f64::max);
    let mean_tile_buffer =
        tiles.iter().map(|t| t.buffer_bytes).sum::<f64>() / tiles.len().max(1) as f64;
    Ok(MappingPlan {
        network: net.name.clone(),
        buffer_mode: mode,
        imas_per_tile: per_tile,
        min_steps,
        layers,
        tiles,
        max_tile_buffer,
        mean_tile_buffer,
        overflow_tiles,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::LayerDesc;

    fn net() -> NetworkDesc {
        NetworkDesc::chained(
            "t",
            (32, 32, 3),
            vec![
                LayerDesc::conv(3, 3, 64, 1),
                LayerDesc::pool(2, 2),
                LayerDesc::conv(3, 3, 512, 1).times(2),
                LayerDesc::pool(2, 2),
                LayerDesc::fc(100),
            ],
        )
        .unwrap()
    }

    #[test]
    fn single_layer_is_one_fragment() {
        let n = NetworkDesc::chained("one", (8, 8, 3), vec![LayerDesc::conv(3, 3, 16, 1)]).unwrap();
        let p = plan_network(&n, &ArchConfig::isaac_like()).unwrap();
        assert_eq!(p.tiles.len(), 1);
        assert_eq!(p.tiles[0].fragments.len(), 1);
        assert_eq!(p.layers[0].replication, 1);
    }

    #[test]
    fn plans_respect_structure() {
        for arch in [ArchConfig::isaac_like(), ArchConfig::newton()] {
            let p = plan_network(&net(), &arch).unwrap();
            p.check(&arch).unwrap();
        }
    }

    #[test]
    fn fc_layers_go_to_fc_tiles() {
        let p = plan_network(&net(), &ArchConfig::newton()).unwrap();
        let fc = p.layers.last().unwrap();
        assert_eq!(fc.tile_kind, TileKind::Fc);
        assert!(fc.tile_ids.iter().all(|&t| p.tiles[t].kind == TileKind::Fc));
        let p = plan_network(&net(), &ArchConfig::isaac_like()).unwrap();
        assert_eq!(p.tile_count(TileKind::Fc), 0);
    }

    #[test]
    fn strassen_frees_one_in_eight() {
        let mut arch = ArchConfig::isaac_like();
        let plain = plan_network(&net(), &arch).unwrap();
        arch.toggles.strassen = true;
        let s = plan_network(&net(), &arch).unwrap();
        let l = &s.layers[2];
        assert!(l.strassen_covered > 0);
        assert_eq!(l.strassen_covered, 8 * l.strassen_freed);
        assert_eq!(plain.layers[2].ima_count - l.ima_count, l.strassen_freed);
    }

    #[test]
    fn capacity_error_reports_deficit() {
        let mut arch = ArchConfig::isaac_like();
        arch.chip.max_tiles = 1;
        let err = plan_network(&net(), &arch).unwrap_err();
        assert!(matches!(err, MapperError::Capacity { available: 1, .. }));
        assert!(err.to_string().contains("short by"));
    }

    #[test]
    fn spread_never_exceeds_naive() {
        let mut arch = ArchConfig::isaac_like();
        let naive = plan_network(&net(), &arch).unwrap();
        arch.toggles.spread_buffers = true;
        let spread = plan_network(&net(), &arch).unwrap();
        assert_eq!(naive.total_crossbars(), spread.total_crossbars());
        for (a, b) in naive.layers.iter().zip(&spread.layers) {
            assert!(b.buffer_bytes_per_tile <= a.buffer_bytes_per_tile);
        }
        assert!(spread.max_tile_buffer <= naive.max_tile_buffer);
    }
}
