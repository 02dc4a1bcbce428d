//! Experiment configuration, read from TOML.
//!
//! ```toml
//! experiment = "instability_demo"
//! seed = 1
//! output_dir = "runs/demo"
//!
//! [params]
//! dim = 1
//! a = 1.0
//! b = 1.0
//! p = 3.0
//! q = 7.0
//! omega = 1.0
//!
//! [evolution]
//! dt0 = 2e-5
//! ```
//!
//! Every section is optional and every key inside a section has a default.
//! Unknown keys anywhere are rejected.

use std::path::{Path, PathBuf};

use nlslab::scaling::AnalysisConfig;
use nlslab::{EvolutionConfig, Parameters, ShootingConfig};
use serde::{Deserialize, Serialize};

use crate::error::CliError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Experiment {
    GroundState,
    OmegaSweep,
    LocateOmega1,
    LemmaChecks,
    InstabilityDemo,
    FreeBenchmark,
}

impl Experiment {
    pub fn name(self) -> &'static str {
        match self {
            Experiment::GroundState => "ground_state",
            Experiment::OmegaSweep => "omega_sweep",
            Experiment::LocateOmega1 => "locate_omega1",
            Experiment::LemmaChecks => "lemma_checks",
            Experiment::InstabilityDemo => "instability_demo",
            Experiment::FreeBenchmark => "free_benchmark",
        }
    }
}

/// Periodic evolution box `[-half_width, half_width)` with `n` points.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct GridConfig {
    pub n: usize,
    pub half_width: f64,
}

impl Default for GridConfig {
    fn default() -> Self {
        GridConfig {
            n: 1024,
            half_width: 32.0,
        }
    }
}

/// Log-spaced frequency sweep.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SweepConfig {
    pub omega_min: f64,
    pub omega_max: f64,
    pub points: usize,
    /// Fraction of the sweep, counted from the top, where the power ratio
    /// must decrease.
    pub tail_fraction: f64,
}

impl Default for SweepConfig {
    fn default() -> Self {
        SweepConfig {
            omega_min: 0.25,
            omega_max: 1024.0,
            points: 41,
            tail_fraction: 0.5,
        }
    }
}

impl SweepConfig {
    pub fn omegas(&self) -> Vec<f64> {
        if self.points == 1 {
            return vec![self.omega_min];
        }
        let step = (self.omega_max / self.omega_min).ln() / (self.points - 1) as f64;
        (0..self.points)
            .map(|i| self.omega_min * (step * i as f64).exp())
            .collect()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Omega1Config {
    pub bracket: [f64; 2],
    pub relative_tolerance: f64,
    /// The instability demo runs at `factor · ω₁`.
    pub factor: f64,
}

impl Default for Omega1Config {
    fn default() -> Self {
        Omega1Config {
            bracket: [0.25, 64.0],
            relative_tolerance: 1e-6,
            factor: 4.0,
        }
    }
}

/// Sizes of the randomized corpora used by `lemma_checks`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct CorpusConfig {
    pub curves: usize,
    pub scan_points: usize,
    pub lemma_inputs: usize,
}

impl Default for CorpusConfig {
    fn default() -> Self {
        CorpusConfig {
            curves: 100,
            scan_points: 1_000_000,
            lemma_inputs: 20,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub experiment: Experiment,
    #[serde(default)]
    pub seed: u64,
    #[serde(default = "default_output_dir")]
    pub output_dir: PathBuf,
    #[serde(default = "default_params")]
    pub params: Parameters,
    #[serde(default)]
    pub solver: ShootingConfig,
    #[serde(default)]
    pub evolution: EvolutionConfig,
    #[serde(default)]
    pub analysis: AnalysisConfig,
    #[serde(default)]
    pub grid: GridConfig,
    #[serde(default)]
    pub sweep: SweepConfig,
    #[serde(default)]
    pub omega1: Omega1Config,
    #[serde(default)]
    pub corpus: CorpusConfig,
    /// Dilation factors applied to the ground state in `instability_demo`.
    #[serde(default = "default_lambdas")]
    pub lambdas: Vec<f64>,
}

fn default_output_dir() -> PathBuf {
    PathBuf::from("runs")
}

fn default_params() -> Parameters {
    Parameters::canonical(1.0)
}

fn default_lambdas() -> Vec<f64> {
    vec![1.02, 1.05, 1.1]
}

impl ExperimentConfig {
    pub fn from_toml(text: &str) -> Result<Self, CliError> {
        let config: ExperimentConfig = toml::from_str(text).map_err(|e| CliError::ConfigParse {
            path: None,
            detail: e.to_string(),
        })?;
        config.validate()?;
        Ok(config)
    }

    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
        Self::from_toml(&text).map_err(|e| match e {
            CliError::ConfigParse { detail, .. } => CliError::ConfigParse {
                path: Some(path.to_path_buf()),
                detail,
            },
            other => other,
        })
    }

    pub fn validate(&self) -> Result<(), CliError> {
        let bad = |detail: String| Err(CliError::InvalidConfig(detail));
        self.params.validate_stationary().map_err(|e| CliError::InvalidConfig(format!("params: {e}")))?;
        self.evolution
            .validate()
            .map_err(|e| CliError::InvalidConfig(e.to_string()))?;
        if self.grid.n < 16 || !self.grid.n.is_power_of_two() {
            return bad(format!("grid.n must be a power of two >= 16, got {}", self.grid.n));
        }
        if !(self.grid.half_width > 0.0) {
            return bad("grid.half_width must be > 0".into());
        }
        let s = &self.sweep;
        if s.points == 0 || !(s.omega_min > 0.0) || (s.points > 1 && !(s.omega_max > s.omega_min)) {
            return bad("sweep needs points >= 1 and 0 < omega_min < omega_max".into());
        }
        if !(s.tail_fraction > 0.0 && s.tail_fraction <= 1.0) {
            return bad("sweep.tail_fraction must lie in (0, 1]".into());
        }
        let [lo, hi] = self.omega1.bracket;
        if !(lo > 0.0 && hi > lo) {
            return bad(format!("omega1.bracket must satisfy 0 < lo < hi, got [{lo}, {hi}]"));
        }
        if !(self.omega1.relative_tolerance > 0.0) || !(self.omega1.factor > 1.0) {
            return bad("omega1 needs relative_tolerance > 0 and factor > 1".into());
        }
        if self.lambdas.is_empty() || self.lambdas.iter().any(|l| !(*l > 0.0)) {
            return bad("lambdas must be a non-empty list of positive numbers".into());
        }
        if self.corpus.scan_points < 16 {
            return bad("corpus.scan_points must be >= 16".into());
        }
        Ok(())
    }
}
