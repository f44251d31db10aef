//! Clifford gates, circuits, and signed Pauli propagation.

mod circuit;
mod gates;
mod propagate;

pub use circuit::{parse_variable, Circuit, GateIdentity};
pub use gates::{GateKind, SingleKind};
pub use propagate::{conjugate_gate, propagate, Step, Trajectory};

use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum CliffordError {
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },
    #[error("{gate} takes {expected} qubits, got {got}")]
    Arity { gate: String, expected: usize, got: usize },
    #[error("gate repeats qubit {0}")]
    DuplicateQubit(usize),
    #[error("qubit {qubit} out of range for {n} qubits")]
    QubitOutOfRange { qubit: usize, n: usize },
    #[error("layer {layer}: gates overlap on qubit {qubit}")]
    OverlappingSupport { layer: usize, qubit: usize },
    #[error("layer {0}: measurement is only allowed as the terminal layer")]
    MeasurementInLayer(usize),
    #[error("width mismatch: expected {expected} qubits, got {got}")]
    Width { expected: usize, got: usize },
}
