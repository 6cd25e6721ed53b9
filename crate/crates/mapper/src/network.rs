use std::fmt;

use serde::{Deserialize, Serialize};

use crate::{MapperError, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum LayerKind {
    Conv,
    Fc,
    /// Max pooling with a `kx × ky` window.
    Pool,
    /// Spatial pyramid pooling to fixed grids; output is flattened.
    Spp,
    /// Global average pooling to 1×1.
    GlobalPool,
}

impl LayerKind {
    pub fn is_compute(self) -> bool {
        matches!(self, LayerKind::Conv | LayerKind::Fc)
    }

    pub fn keyword(self) -> &'static str {
        match self {
            LayerKind::Conv => "conv",
            LayerKind::Fc => "fc",
            LayerKind::Pool => "pool",
            LayerKind::Spp => "spp",
            LayerKind::GlobalPool => "gap",
        }
    }
}

/// One row of a network table: `repeat` identical layers.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct LayerDesc {
    pub kind: LayerKind,
    pub kx: u32,
    pub ky: u32,
    /// Input channels of the first repetition (flattened inputs for FC).
    pub ni: u32,
    /// Output channels (neurons for FC).
    pub no: u32,
    pub stride: u32,
    pub input_w: u32,
    pub input_h: u32,
    pub repeat: u32,
    /// Part of a residual block: consecutive flagged layers pair up and
    /// each pair carries one skip connection.
    pub residual: bool,
    /// Pyramid grid sizes for SPP layers.
    pub spp_levels: Vec<u32>,
}

impl LayerDesc {
    pub fn conv(kx: u32, ky: u32, no: u32, stride: u32) -> Self {
        LayerDesc {
            kind: LayerKind::Conv,
            kx,
            ky,
            ni: 0,
            no,
            stride,
            input_w: 0,
            input_h: 0,
            repeat: 1,
            residual: false,
            spp_levels: Vec::new(),
        }
    }

    pub fn fc(no: u32) -> Self {
        LayerDesc {
            kind: LayerKind::Fc,
            ..Self::conv(1, 1, no, 1)
        }
    }

    pub fn pool(k: u32, stride: u32) -> Self {
        LayerDesc {
            kind: LayerKind::Pool,
            ..Self::conv(k, k, 0, stride)
        }
    }

    pub fn spp(levels: Vec<u32>) -> Self {
        LayerDesc {
            kind: LayerKind::Spp,
            spp_levels: levels,
            ..Self::conv(1, 1, 0, 1)
        }
    }

    pub fn global_pool() -> Self {
        LayerDesc {
            kind: LayerKind::GlobalPool,
            ..Self::conv(1, 1, 0, 1)
        }
    }

    pub fn times(mut self, repeat: u32) -> Self {
        self.repeat = repeat;
        self
    }

    pub fn residual(mut self) -> Self {
        self.residual = true;
        self
    }

    /// Output (width, height, channels) for an input of the given shape.
    pub fn output_shape(&self, w: u32, h: u32, c: u32) -> (u32, u32, u32) {
        match self.kind {
            LayerKind::Conv => (w.div_ceil(self.stride), h.div_ceil(self.stride), self.no),
            LayerKind::Pool => (w.div_ceil(self.stride), h.div_ceil(self.stride), c),
            LayerKind::Fc => (1, 1, self.no),
            LayerKind::Spp => (1, 1, c * self.spp_levels.iter().map(|l| l * l).sum::<u32>()),
            LayerKind::GlobalPool => (1, 1, c),
        }
    }
}

impl fmt::Display for LayerDesc {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.kind {
            LayerKind::Conv => write!(
                f,
                "conv {}x{}, {}/{}",
                self.kx, self.ky, self.no, self.stride
            )?,
            LayerKind::Fc => write!(f, "fc {}", self.no)?,
            LayerKind::Pool => write!(f, "pool {}x{}/{}", self.kx, self.ky, self.stride)?,
            LayerKind::Spp => {
                let l: Vec<String> = self.spp_levels.iter().map(u32::to_string).collect();
                write!(f, "spp {}", l.join(","))?
            }
            LayerKind::GlobalPool => write!(f, "gap")?,
        }
        if self.repeat != 1 {
            write!(f, " ({})", self.repeat)?;
        }
        Ok(())
    }
}

/// A single layer after expanding repeats, with its resolved shapes.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct LayerInstance {
    /// Position among all expanded layers.
    pub index: usize,
    /// Source row in the network description.
    pub block: usize,
    pub name: String,
    pub kind: LayerKind,
    pub kx: u32,
    pub ky: u32,
    pub ni: u32,
    pub no: u32,
    pub stride: u32,
    pub input_w: u32,
    pub input_h: u32,
    pub output_w: u32,
    pub output_h: u32,
    pub residual: bool,
}

impl LayerInstance {
    /// Weight-matrix rows: inputs feeding one output.
    pub fn weight_rows(&self) -> u64 {
        self.kx as u64 * self.ky as u64 * self.ni as u64
    }

    /// Sliding-window positions per image.
    pub fn steps(&self) -> u64 {
        self.output_w as u64 * self.output_h as u64
    }

    pub fn macs(&self) -> u64 {
        if self.kind.is_compute() {
            self.weight_rows() * self.no as u64 * self.steps()
        } else {
            0
        }
    }
}

/// Largest flattened activation a network may carry between layers.
const MAX_EXTENT: u64 = 1 << 30;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct NetworkDesc {
    pub name: String,
    pub input_w: u32,
    pub input_h: u32,
    pub input_c: u32,
    pub layers: Vec<LayerDesc>,
}

impl NetworkDesc {
    /// Builds a network from layer rows, filling in input shapes left at 0
    /// from the chain. Stated shapes are kept and checked.
    pub fn chained(name: &str, input: (u32, u32, u32), rows: Vec<LayerDesc>) -> Result<Self> {
        let (mut w, mut h, mut c) = input;
        let mut layers = Vec::with_capacity(rows.len());
        for (i, mut row) in rows.into_iter().enumerate() {
            let flat = c as u64 * w as u64 * h as u64;
            let pyramid: u64 = row.spp_levels.iter().map(|&l| l as u64 * l as u64).sum();
            if flat > MAX_EXTENT || c as u64 * pyramid.max(1) > MAX_EXTENT {
                return Err(MapperError::InvalidLayer {
                    index: i + 1,
                    layer: row.to_string(),
                    reason: format!("input of {w}x{h}x{c} values is too large"),
                });
            }
            if row.input_w == 0 && row.input_h == 0 {
                row.input_w = w;
                row.input_h = h;
            }
            if row.ni == 0 {
                row.ni = match row.kind {
                    LayerKind::Fc => c * w * h,
                    _ => c,
                };
            }
            if !row.kind.is_compute() {
                row.no = row.output_shape(w, h, row.ni).2;
            }
            for _ in 0..row.repeat.max(1) {
                let next = row.output_shape(w, h, c);
                (w, h, c) = next;
            }
            layers.push(row);
        }
        let net = NetworkDesc {
            name: name.to_string(),
            input_w: input.0,
            input_h: input.1,
            input_c: input.2,
            layers,
        };
        net.validate()?;
        Ok(net)
    }

    /// Same network at a different input resolution.
    pub fn with_input_size(&self, w: u32, h: u32) -> Result<Self> {
        let rows = self
            .layers
            .iter()
            .map(|l| LayerDesc {
                ni: 0,
                input_w: 0,
                input_h: 0,
                ..l.clone()
            })
            .collect();
        NetworkDesc::chained(&self.name, (w, h, self.input_c), rows)
    }

    /// Checks every row's stated input shape against its predecessor.
    pub fn validate(&self) -> Result<()> {
        if self.layers.is_empty() {
            return Err(MapperError::Empty(self.name.clone()));
        }
        let (mut w, mut h, mut c) = (self.input_w, self.input_h, self.input_c);
        let mut prev = "input".to_string();
        for (i, l) in self.layers.iter().enumerate() {
            let here = format!("#{} `{}`", i + 1, l);
            let invalid = |reason: &str| MapperError::InvalidLayer {
                index: i + 1,
                layer: l.to_string(),
                reason: reason.to_string(),
            };
            if l.repeat == 0 {
                return Err(invalid("repeat count must be at least 1"));
            }
            match l.kind {
                LayerKind::Conv | LayerKind::Pool if l.kx == 0 || l.ky == 0 || l.stride == 0 => {
                    return Err(invalid("kernel and stride must be positive"));
                }
                LayerKind::Conv | LayerKind::Fc if l.no == 0 => {
                    return Err(invalid("output count must be positive"));
                }
                LayerKind::Fc if l.kx != 1 || l.ky != 1 => {
                    return Err(invalid("fc layers have a 1x1 kernel"));
                }
                LayerKind::Spp if l.spp_levels.is_empty() || l.spp_levels.contains(&0) => {
                    return Err(invalid("spp needs positive pyramid levels"));
                }
                _ => {}
            }
            if l.input_w != w || l.input_h != h {
                return Err(MapperError::Chain {
                    from: prev,
                    to: here,
                    reason: format!(
                        "expects {}x{} input but receives {}x{}",
                        l.input_w, l.input_h, w, h
                    ),
                });
            }
            let expect_ni = if l.kind == LayerKind::Fc {
                c * w * h
            } else {
                c
            };
            if l.ni != expect_ni {
                return Err(MapperError::Chain {
                    from: prev,
                    to: here,
                    reason: format!("expects {} inputs but receives {expect_ni}", l.ni),
                });
            }
            for _ in 0..l.repeat {
                (w, h, c) = l.output_shape(w, h, c);
            }
            prev = here;
        }
        Ok(())
    }

    /// Expands repeats into individual layers with resolved shapes.
    pub fn instances(&self) -> Vec<LayerInstance> {
        let mut out = Vec::new();
        let mut counts = std::collections::HashMap::new();
        let (mut w, mut h, mut c) = (self.input_w, self.input_h, self.input_c);
        for (b, l) in self.layers.iter().enumerate() {
            for _ in 0..l.repeat {
                let (ow, oh, oc) = l.output_shape(w, h, c);
                let n = counts.entry(l.kind.keyword()).or_insert(0);
                *n += 1;
                let ni = if l.kind == LayerKind::Fc {
                    c * w * h
                } else {
                    c
                };
                out.push(LayerInstance {
                    index: out.len(),
                    block: b,
                    name: format!("{}{}", l.kind.keyword(), n),
                    kind: l.kind,
                    kx: l.kx,
                    ky: l.ky,
                    ni,
                    no: oc,
                    stride: l.stride,
                    input_w: w,
                    input_h: h,
                    output_w: ow,
                    output_h: oh,
                    residual: l.residual,
                });
                (w, h, c) = (ow, oh, oc);
            }
        }
        out
    }

    pub fn compute_layers(&self) -> Vec<LayerInstance> {
        self.instances()
            .into_iter()
            .filter(|l| l.kind.is_compute())
            .collect()
    }

    pub fn total_macs(&self) -> u64 {
        self.instances().iter().map(LayerInstance::macs).sum()
    }

    /// Pairs of residual-flagged conv layer indices, one per skip edge.
    pub fn skip_edges(&self) -> Vec<(usize, usize)> {
        let flagged: Vec<usize> = self
            .instances()
            .iter()
            .filter(|l| l.residual && l.kind == LayerKind::Conv)
            .map(|l| l.index)
            .collect();
        flagged.chunks_exact(2).map(|p| (p[0], p[1])).collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn vgg_like() -> NetworkDesc {
        NetworkDesc::chained(
            "t",
            (224, 224, 3),
            vec![
                LayerDesc::conv(3, 3, 64, 1),
                LayerDesc::pool(2, 2),
                LayerDesc::conv(3, 3, 128, 1).times(2),
                LayerDesc::spp(vec![7, 3, 2, 1]),
                LayerDesc::fc(4096).times(2),
                LayerDesc::fc(1000),
            ],
        )
        .unwrap()
    }

    #[test]
    fn chaining_fills_shapes() {
        let n = vgg_like();
        let inst = n.instances();
        assert_eq!(inst.len(), 8);
        assert_eq!(inst[2].ni, 64);
        assert_eq!(inst[3].ni, 128);
        assert_eq!((inst[3].input_w, inst[3].output_w), (112, 112));
        assert_eq!(inst[5].ni, 128 * 63);
        assert_eq!(inst[6].ni, 4096);
        assert_eq!(n.compute_layers().len(), 6);
    }

    #[test]
    fn broken_chain_names_layers() {
        let mut n = vgg_like();
        n.layers[2].ni = 65;
        let err = n.validate().unwrap_err().to_string();
        assert!(err.contains("#2") && err.contains("#3"), "{err}");
    }

    #[test]
    fn resize_keeps_structure() {
        let n = vgg_like().with_input_size(256, 256).unwrap();
        assert_eq!(n.layers.len(), 6);
        assert_eq!(n.instances()[5].ni, 128 * 63);
        assert_eq!(n.instances()[2].input_w, 128);
    }
}
