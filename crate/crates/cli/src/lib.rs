//! Configuration-driven experiment runner for `nlslab`.
//!
//! A run reads an [`ExperimentConfig`], writes its data files into the output
//! directory together with
//!
//! - `manifest.json`: tool name, version and the fully resolved config;
//! - `timestamp.txt`: wall-clock start time, kept apart so that every other
//!   file is reproducible byte for byte;
//! - `summary.txt` / `summary.json`: one pass/fail line per checked invariant.

pub mod config;
pub mod error;
pub mod experiments;
pub mod plotdata;
pub mod summary;

use std::path::{Path, PathBuf};

use serde::Serialize;

pub use config::{Experiment, ExperimentConfig};
pub use error::CliError;
pub use plotdata::emit_plotdata;
pub use summary::{Check, Summary};

use experiments::RunDir;

pub const TOOL: &str = "nlslab";
pub const VERSION: &str = env!("CARGO_PKG_VERSION");

#[derive(Serialize)]
struct Manifest<'a> {
    tool: &'static str,
    version: &'static str,
    experiment: &'static str,
    config: &'a ExperimentConfig,
}

#[derive(Debug, Clone)]
pub struct RunOutcome {
    pub dir: PathBuf,
    pub summary: Summary,
}

impl RunOutcome {
    pub fn passed(&self) -> bool {
        self.summary.all_passed()
    }
}

/// Run the configured experiment into `config.output_dir`.
pub fn run(config: &ExperimentConfig) -> Result<RunOutcome, CliError> {
    config.validate()?;
    let dir = RunDir::create(&config.output_dir)?;
    dir.write_json(
        "manifest.json",
        &Manifest {
            tool: TOOL,
            version: VERSION,
            experiment: config.experiment.name(),
            config,
        },
    )?;
    let started = std::time::SystemTime::now()
        .duration_since(std::time::UNIX_EPOCH)
        .map(|d| d.as_secs())
        .unwrap_or(0);
    dir.write("timestamp.txt", format!("started_unix = {started}\n"))?;

    let mut summary = Summary::default();
    log::info!("running {} into {}", config.experiment.name(), config.output_dir.display());
    experiments::dispatch(config, &dir, &mut summary)?;
    dir.write("summary.txt", summary.render())?;
    dir.write_json("summary.json", &summary)?;
    Ok(RunOutcome {
        dir: config.output_dir.clone(),
        summary,
    })
}

/// Load a config file, optionally redirect its output, and run it.
pub fn run_file(path: &Path, output_dir: Option<&Path>) -> Result<RunOutcome, CliError> {
    let mut config = ExperimentConfig::load(path)?;
    if let Some(dir) = output_dir {
        config.output_dir = dir.to_path_buf();
    }
    run(&config)
}
