use super::SimulatorError;
use crate::clifford::{propagate, Circuit, Trajectory};
use crate::noise::NoiseModel;
use crate::pauli::PauliString;

/// Product of the eigenvalues of every (gate, label) step of a trajectory.
pub fn trajectory_eigenvalue(trajectory: &Trajectory, noise: &NoiseModel) -> Result<f64, SimulatorError> {
    let mut lambda = 1.0;
    for step in &trajectory.steps {
        lambda *= noise.eigenvalue(&step.gate, step.label)?;
    }
    Ok(lambda)
}

/// Circuit eigenvalue of `input` with the ideal output sign folded out.
pub fn exact_circuit_eigenvalue(circuit: &Circuit, noise: &NoiseModel, input: &PauliString) -> Result<f64, SimulatorError> {
    trajectory_eigenvalue(&propagate(circuit, input)?, noise)
}
