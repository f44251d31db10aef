use super::{Circuit, CliffordError, GateIdentity};
use crate::pauli::{PauliIndex, PauliString};

/// One gate touched by a propagating Pauli, with the label restricted to the
/// gate's support as it enters the gate.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Step {
    pub gate: GateIdentity,
    pub label: PauliIndex,
    /// Layer of the gate; `None` for the terminal measurement.
    pub layer: Option<usize>,
}

impl Step {
    pub fn is_measurement(&self) -> bool {
        self.layer.is_none()
    }
}

/// The path of one input Pauli through a circuit.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Trajectory {
    pub input: PauliString,
    pub steps: Vec<Step>,
    /// Ideal output `C(P_in)`, sign included.
    pub output: PauliString,
}

impl Trajectory {
    pub fn gate_steps(&self) -> impl Iterator<Item = &Step> {
        self.steps.iter().filter(|s| !s.is_measurement())
    }

    pub fn measurement_steps(&self) -> impl Iterator<Item = &Step> {
        self.steps.iter().filter(|s| s.is_measurement())
    }
}

/// Signed conjugation `G P G†` of a full Pauli string by one gate.
pub fn conjugate_gate(gate: &GateIdentity, p: &PauliString) -> Result<PauliString, CliffordError> {
    if gate.kind().is_measurement() {
        return Err(CliffordError::MeasurementInLayer(0));
    }
    for &q in gate.qubits() {
        if q >= p.num_qubits() {
            return Err(CliffordError::QubitOutOfRange { qubit: q, n: p.num_qubits() });
        }
    }
    let mut out = p.clone();
    apply_gate(gate, &mut out);
    Ok(out)
}

#[inline]
pub(crate) fn apply_gate(gate: &GateIdentity, p: &mut PauliString) -> (PauliIndex, bool) {
    let label = p.restrict(gate.qubits());
    let (image, negative) = gate.kind().conjugate_label(label);
    p.set_restricted(gate.qubits(), image);
    if negative {
        p.negate();
    }
    (label, negative)
}

/// Conjugate `p` through `circuit` layer by layer, recording every gate whose
/// support meets the propagating Pauli and one measurement step per qubit in
/// the support of the output.
pub fn propagate(circuit: &Circuit, p: &PauliString) -> Result<Trajectory, CliffordError> {
    if p.num_qubits() != circuit.num_qubits() {
        return Err(CliffordError::Width { expected: circuit.num_qubits(), got: p.num_qubits() });
    }
    let mut current = p.clone();
    let mut steps = Vec::new();
    let mut touched: Vec<usize> = Vec::with_capacity(8);
    for (li, layer) in circuit.layers().iter().enumerate() {
        touched.clear();
        for q in current.support() {
            if let Some(g) = circuit.gate_at(li, q) {
                if !touched.contains(&g) {
                    touched.push(g);
                }
            }
        }
        for &g in &touched {
            let gate = &layer[g];
            let (label, _) = apply_gate(gate, &mut current);
            steps.push(Step { gate: gate.clone(), label, layer: Some(li) });
        }
    }
    for q in current.support() {
        steps.push(Step {
            gate: GateIdentity::meas(q),
            label: PauliIndex(current.get(q).code() as u16),
            layer: None,
        });
    }
    Ok(Trajectory { input: p.clone(), steps, output: current })
}
