//! Pauli channels, the eigenvalue/error-rate duality, device noise models and
//! their file format.

mod channel;
mod file;
mod model;

pub use channel::{eigenvalues_from_rates, rates_from_eigenvalues, tvd, PauliChannel, RateReconstruction, NORMALIZATION_TOL};
pub use file::{load_noise_model, save_noise_model, NoiseFile};
pub use model::{random_noise_model, GateInventory, NoiseModel, NoiseRanges, Range};

use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum NoiseError {
    #[error("rate vector length {0} is not 4^k")]
    Length(usize),
    #[error("rate {index} = {value} outside [0, 1]")]
    InvalidRate { index: usize, value: f64 },
    #[error("rates sum to {0}, not 1")]
    NotNormalized(f64),
    #[error("identity eigenvalue must be 1, got {0}")]
    IdentityEigenvalue(f64),
    #[error("invalid {class} range [{lo}, {hi}]")]
    InvalidRange { class: String, lo: f64, hi: f64 },
    #[error("unknown error class {0:?}")]
    UnknownClass(String),
    #[error("no noise entry for {0}")]
    MissingGate(String),
    #[error("channel on {k} qubits does not fit gate {gate}")]
    Arity { gate: String, k: usize },
    #[error("readout flip {value} for qubit {qubit} outside [0, 1/2)")]
    InvalidReadout { qubit: usize, value: f64 },
    #[error("noise file: {0}")]
    File(String),
}
