use std::path::Path;

use xbar_arch::ArchConfig;
use xbar_mapper::NetworkDesc;

use crate::{parse_network, Result, WorkloadError};

/// The nine benchmark networks as shipped text, in suite order.
pub const BENCHMARKS: [(&str, &str); 9] = [
    ("alexnet", include_str!("../data/networks/alexnet.net")),
    ("vgg-a", include_str!("../data/networks/vgg-a.net")),
    ("vgg-b", include_str!("../data/networks/vgg-b.net")),
    ("vgg-c", include_str!("../data/networks/vgg-c.net")),
    ("vgg-d", include_str!("../data/networks/vgg-d.net")),
    ("msra-a", include_str!("../data/networks/msra-a.net")),
    ("msra-b", include_str!("../data/networks/msra-b.net")),
    ("msra-c", include_str!("../data/networks/msra-c.net")),
    ("resnet-34", include_str!("../data/networks/resnet-34.net")),
];

/// Shipped architecture configs.
pub const ARCHITECTURES: [(&str, &str); 2] = [
    ("isaac", include_str!("../data/arch/isaac.arch")),
    ("newton", include_str!("../data/arch/newton.arch")),
];

pub fn benchmark(name: &str) -> Result<NetworkDesc> {
    let (_, text) = BENCHMARKS
        .iter()
        .find(|(n, _)| n.eq_ignore_ascii_case(name))
        .ok_or_else(|| WorkloadError::UnknownBenchmark(name.to_string()))?;
    parse_network(text)
}

pub fn suite() -> Result<Vec<NetworkDesc>> {
    BENCHMARKS.iter().map(|(_, t)| parse_network(t)).collect()
}

fn read(path: &Path) -> Result<String> {
    std::fs::read_to_string(path).map_err(|source| WorkloadError::Io {
        path: path.to_path_buf(),
        source,
    })
}

/// Loads a network file. A bare benchmark name is also accepted when no
/// such file exists.
pub fn load_network(path: &Path) -> Result<NetworkDesc> {
    if !path.exists() {
        if let Some(name) = path.to_str() {
            if let Ok(net) = benchmark(name) {
                return Ok(net);
            }
        }
    }
    parse_network(&read(path)?).map_err(|e| e.in_file(path))
}

/// Loads an architecture file, or a shipped one by name (`isaac`, `newton`).
pub fn load_arch(path: &Path) -> Result<ArchConfig> {
    if !path.exists() {
        if let Some((_, text)) = ARCHITECTURES
            .iter()
            .find(|(n, _)| Some(*n) == path.to_str())
        {
            return Ok(ArchConfig::from_toml_str(text)?);
        }
    }
    Ok(ArchConfig::from_toml_str(&read(path)?)?)
}
