//! End-to-end runs: generate, design, simulate, solve, report.

mod config;
mod pipeline;
mod stats;

pub use config::{DesignConfig, ExperimentConfig, NoiseConfig, SimulatorConfig};
pub use pipeline::{
    configure_threads, generate_with_retry, run_pipeline, run_stage, AttemptRecord, DesignRecord, GenerateRecord,
    GeneratedDesign, RunOptions, ShotSummary, SimulateRecord, SolveRecord, Stage, Summary,
};
pub use stats::{percentile, Stats};

use std::path::Path;

use thiserror::Error;

use crate::clifford::CliffordError;
use crate::design::DesignError;
use crate::generator::GeneratorError;
use crate::noise::NoiseError;
use crate::simulator::SimulatorError;

#[derive(Debug, Error)]
pub enum ExperimentError {
    #[error("config: {0}")]
    Config(String),
    #[error("{path}: {message}")]
    Io { path: String, message: String },
    #[error("missing artifact {0}; run the earlier stage first")]
    Missing(String),
    #[error("no rank-N design after {attempts} attempts: {last}")]
    RankFailure { attempts: usize, last: DesignError },
    #[error(transparent)]
    Clifford(#[from] CliffordError),
    #[error(transparent)]
    Generator(#[from] GeneratorError),
    #[error(transparent)]
    Noise(#[from] NoiseError),
    #[error(transparent)]
    Simulator(#[from] SimulatorError),
    #[error(transparent)]
    Design(#[from] DesignError),
}

impl ExperimentError {
    pub(crate) fn io(path: &Path, e: impl std::fmt::Display) -> ExperimentError {
        ExperimentError::Io { path: path.display().to_string(), message: e.to_string() }
    }
}
