//! Design matrix, log-domain least-squares solve and diagnostics.
//!
//! Row `μ` is a (circuit, input Pauli) pair, column `ν` a (gate, Pauli)
//! variable, and `A[μ][ν]` counts how often the trajectory of `μ` passes
//! through `ν`. With `x = -ln λ` and `b = -ln Λ`, the circuit eigenvalues
//! satisfy `A x = b`.

mod diagnostics;
mod export;
mod lsqr;
mod matrix;
mod solve;

pub use diagnostics::{analyze, diagnostics, gram_rank, Diagnostics, RankMethod, RankReport};
pub use export::{read_solution_csv, write_column_map, write_row_map, write_solution_csv, write_triplets, SolutionRow};
pub use lsqr::{lsqr, LsqrResult};
pub use matrix::{build_design, DesignMatrix, InventoryMode, RowKey, Variable};
pub use solve::{align_estimates, solve, GateEstimate, GateTruth, Solution, SolveOptions};

use thiserror::Error;

use crate::clifford::CliffordError;
use crate::noise::NoiseError;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum DesignError {
    #[error(transparent)]
    Clifford(#[from] CliffordError),
    #[error(transparent)]
    Noise(#[from] NoiseError),
    #[error("variable {0} is not in the frozen inventory")]
    UnknownVariable(String),
    #[error("row references circuit {0}, which does not exist")]
    UnknownCircuit(usize),
    #[error("design has rank {rank} < {columns}; unidentifiable combinations:\n{combinations}")]
    RankDeficient { rank: usize, columns: usize, combinations: String },
    #[error("no usable rows left for {0}")]
    AllRowsDropped(String),
    #[error("no estimate for row {0}")]
    MissingEstimate(String),
    #[error("duplicate estimate for row {0}")]
    DuplicateEstimate(String),
    #[error("solution file: {0}")]
    Csv(String),
}
