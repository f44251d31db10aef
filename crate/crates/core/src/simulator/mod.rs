//! Circuit eigenvalues: the exact product formula and a shot-level
//! eigenvalue-sampling simulator.

mod batch;
mod csv_io;
mod exact;
mod shots;

pub use batch::{batch_inputs, batch_trajectories, Batch};
pub(crate) use csv_io::fmt_real;
pub use csv_io::{read_estimates_csv, write_estimates_csv, EstimateTable};
pub use exact::{exact_circuit_eigenvalue, trajectory_eigenvalue};
pub use shots::{simulate_batch, simulate_experiment, EigenvalueEstimate, ShotCounts, SimOptions};

use thiserror::Error;

use crate::clifford::CliffordError;
use crate::noise::NoiseError;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum SimulatorError {
    #[error(transparent)]
    Clifford(#[from] CliffordError),
    #[error(transparent)]
    Noise(#[from] NoiseError),
    #[error("shot count must be positive")]
    ZeroShots,
    #[error("batch members overlap on qubit {0}")]
    OverlappingBatch(usize),
    #[error("estimates file: {0}")]
    Csv(String),
}
