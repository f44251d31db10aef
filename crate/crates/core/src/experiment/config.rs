//! Experiment configuration file.

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use super::ExperimentError;
use crate::design::SolveOptions;
use crate::generator::{geometric_schedule, spread_indices, ExperimentDesignSpec, GateSet};
use crate::noise::NoiseRanges;
use crate::simulator::SimOptions;

fn default_shots() -> Vec<u64> {
    vec![10_000]
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    /// Master seed; every random draw derives from it.
    pub seed: u64,
    #[serde(default = "default_shots")]
    pub shots: Vec<u64>,
    #[serde(default)]
    pub out_dir: Option<PathBuf>,
    pub design: DesignConfig,
    #[serde(default)]
    pub noise: NoiseConfig,
    #[serde(default)]
    pub solver: SolveOptions,
    #[serde(default)]
    pub simulator: SimulatorConfig,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct DesignConfig {
    pub n: usize,
    pub circuits: usize,
    pub min_half_depth: usize,
    pub max_half_depth: usize,
    /// Explicit half-depths, overriding the geometric schedule.
    pub half_depths: Option<Vec<usize>>,
    pub pad_depth: usize,
    /// Number of circuits, spread evenly over the schedule, that also get
    /// nearest-neighbour weight-2 inputs.
    pub weight_two_circuits: usize,
    pub weight_cap: usize,
    pub gate_set: GateSet,
    /// Rank retries: each raises the pad depth by `pad_increment` up to
    /// `max_pad_depth`, then adds a circuit.
    pub max_retries: usize,
    pub pad_increment: usize,
    pub max_pad_depth: usize,
    /// Largest column count analyzed by dense SVD.
    pub dense_limit: usize,
}

impl Default for DesignConfig {
    fn default() -> Self {
        DesignConfig {
            n: 20,
            circuits: 12,
            min_half_depth: 1,
            max_half_depth: 12,
            half_depths: None,
            pad_depth: 5,
            weight_two_circuits: 12,
            weight_cap: 10,
            gate_set: GateSet::default(),
            max_retries: 4,
            pad_increment: 5,
            max_pad_depth: 20,
            dense_limit: 3000,
        }
    }
}

impl DesignConfig {
    pub fn schedule(&self, circuits: usize) -> Vec<usize> {
        match &self.half_depths {
            Some(d) if d.len() >= circuits => d[..circuits].to_vec(),
            Some(d) => {
                // extra circuits reuse the explicit depths cyclically
                (0..circuits).map(|i| d[i % d.len()]).collect()
            }
            None => geometric_schedule(circuits, self.min_half_depth, self.max_half_depth),
        }
    }

    pub fn spec(&self, seed: u64, circuits: usize, pad_depth: usize) -> ExperimentDesignSpec {
        ExperimentDesignSpec {
            n: self.n,
            half_depths: self.schedule(circuits),
            pad_depth,
            weight_two_circuits: spread_indices(circuits, self.weight_two_circuits),
            weight_cap: self.weight_cap,
            gate_set: self.gate_set.clone(),
            seed,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct NoiseConfig {
    /// Noise-model file; relative paths are resolved against the config file.
    pub file: Option<PathBuf>,
    /// Seed of the random model, derived from the master seed when absent.
    pub seed: Option<u64>,
    pub ranges: NoiseRanges,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct SimulatorConfig {
    pub block_size: usize,
    pub batching: bool,
}

impl Default for SimulatorConfig {
    fn default() -> Self {
        let d = SimOptions::default();
        SimulatorConfig { block_size: d.block_size, batching: d.batching }
    }
}

impl SimulatorConfig {
    pub fn options(&self) -> SimOptions {
        SimOptions { block_size: self.block_size, batching: self.batching }
    }
}

impl ExperimentConfig {
    /// Desk-scale defaults with the given seed.
    pub fn with_seed(seed: u64) -> ExperimentConfig {
        ExperimentConfig {
            seed,
            shots: default_shots(),
            out_dir: None,
            design: DesignConfig::default(),
            noise: NoiseConfig::default(),
            solver: SolveOptions::default(),
            simulator: SimulatorConfig::default(),
        }
    }

    pub fn from_toml(text: &str) -> Result<ExperimentConfig, ExperimentError> {
        let cfg: ExperimentConfig = toml::from_str(text).map_err(|e| ExperimentError::Config(e.to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    /// Load and resolve relative paths against the file's directory.
    pub fn load(path: &Path) -> Result<ExperimentConfig, ExperimentError> {
        let text = std::fs::read_to_string(path).map_err(|e| ExperimentError::io(path, e))?;
        let mut cfg = ExperimentConfig::from_toml(&text)?;
        let base = path.parent().unwrap_or(Path::new("."));
        if let Some(f) = &cfg.noise.file {
            if f.is_relative() {
                cfg.noise.file = Some(base.join(f));
            }
        }
        if let Some(f) = &cfg.noise.file {
            if !f.exists() {
                return Err(ExperimentError::Config(format!("noise file {} does not exist", f.display())));
            }
        }
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<(), ExperimentError> {
        let bad = |m: &str| Err(ExperimentError::Config(m.to_string()));
        if self.shots.is_empty() || self.shots.contains(&0) {
            return bad("shots must be a non-empty list of positive counts");
        }
        let d = &self.design;
        if d.circuits == 0 {
            return bad("design.circuits must be at least 1");
        }
        if d.half_depths.is_none() && (d.min_half_depth == 0 || d.min_half_depth > d.max_half_depth) {
            return bad("need 1 <= design.min_half_depth <= design.max_half_depth");
        }
        if d.half_depths.as_ref().is_some_and(|h| h.is_empty()) {
            return bad("design.half_depths must not be empty");
        }
        if d.pad_increment == 0 && d.max_retries > 0 && d.pad_depth < d.max_pad_depth {
            return bad("design.pad_increment must be positive");
        }
        if self.simulator.block_size == 0 {
            return bad("simulator.block_size must be positive");
        }
        self.noise.ranges.validate().map_err(|e| ExperimentError::Config(e.to_string()))?;
        self.design.spec(self.seed, d.circuits, d.pad_depth).validate().map_err(|e| ExperimentError::Config(e.to_string()))
    }
}
