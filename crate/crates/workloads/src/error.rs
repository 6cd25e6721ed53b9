use std::path::PathBuf;

use thiserror::Error;

#[derive(Debug, Error)]
pub enum WorkloadError {
    #[error("{}{line}:{column}: {message}", file.as_deref().map(|f| format!("{f}:")).unwrap_or_default())]
    Parse {
        file: Option<String>,
        line: usize,
        column: usize,
        message: String,
    },
    #[error("cannot read {}", path.display())]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("unknown benchmark `{0}`")]
    UnknownBenchmark(String),
    #[error(transparent)]
    Network(#[from] xbar_mapper::MapperError),
    #[error(transparent)]
    Arch(#[from] xbar_arch::ArchError),
}

impl WorkloadError {
    /// Attaches a file name to parse errors.
    pub fn in_file(mut self, path: &std::path::Path) -> WorkloadError {
        if let WorkloadError::Parse { file, .. } = &mut self {
            *file = Some(path.display().to_string());
        }
        self
    }
}
