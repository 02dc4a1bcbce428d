use std::path::{Path, PathBuf};

use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("cannot parse config{}: {detail}", .path.as_ref().map(|p| format!(" {}", p.display())).unwrap_or_default())]
    ConfigParse { path: Option<PathBuf>, detail: String },

    #[error("invalid config: {0}")]
    InvalidConfig(String),

    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("{experiment}: {stage}: {source}")]
    Experiment {
        experiment: &'static str,
        stage: String,
        #[source]
        source: nlslab::Error,
    },

    #[error("no plottable artifacts in {0}")]
    MissingArtifacts(PathBuf),

    #[error("json: {0}")]
    Json(#[from] serde_json::Error),
}

impl CliError {
    pub fn io(path: &Path, source: std::io::Error) -> Self {
        CliError::Io {
            path: path.to_path_buf(),
            source,
        }
    }
}
