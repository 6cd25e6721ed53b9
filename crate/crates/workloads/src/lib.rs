//! Benchmark networks, the network description grammar and file loading.

mod error;
mod grammar;
mod suite;

pub use error::WorkloadError;
pub use grammar::{parse_network, write_network};
pub use suite::{benchmark, load_arch, load_network, suite, ARCHITECTURES, BENCHMARKS};

pub type Result<T> = std::result::Result<T, WorkloadError>;
