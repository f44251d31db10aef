use super::SimulatorError;
use crate::clifford::{propagate, Circuit, Trajectory};
use crate::pauli::PauliString;

/// Inputs prepared and measured together in one set of shots.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Batch {
    /// Indices into the circuit's input list, ascending.
    pub members: Vec<usize>,
    /// Per-qubit measurement basis, identity where unmeasured.
    pub basis: PauliString,
}

fn overlaps(mask: &[u64], other: &[u64]) -> Option<usize> {
    mask.iter()
        .zip(other)
        .enumerate()
        .find(|(_, (a, b))| *a & *b != 0)
        .map(|(w, (a, b))| 64 * w + (a & b).trailing_zeros() as usize)
}

fn or_into(mask: &mut [u64], other: &[u64]) {
    mask.iter_mut().zip(other).for_each(|(a, b)| *a |= b);
}

/// Greedy first-fit packing: each trajectory joins the first batch in which
/// neither its input nor its output support meets those already present.
pub fn batch_trajectories(trajectories: &[Trajectory]) -> Vec<Batch> {
    let mut batches: Vec<(Batch, Vec<u64>, Vec<u64>)> = Vec::new();
    for (i, t) in trajectories.iter().enumerate() {
        let input = t.input.support_mask();
        let output = t.output.support_mask();
        let slot = batches
            .iter()
            .position(|(_, ins, outs)| overlaps(ins, &input).is_none() && overlaps(outs, &output).is_none());
        let (batch, ins, outs) = match slot {
            Some(s) => &mut batches[s],
            None => {
                let n = t.input.num_qubits();
                batches.push((
                    Batch { members: Vec::new(), basis: PauliString::identity(n) },
                    vec![0; input.len()],
                    vec![0; output.len()],
                ));
                batches.last_mut().expect("just pushed")
            }
        };
        batch.members.push(i);
        for q in t.output.support() {
            batch.basis.set(q, t.output.get(q));
        }
        or_into(ins, &input);
        or_into(outs, &output);
    }
    batches.into_iter().map(|(b, _, _)| b).collect()
}

pub fn batch_inputs(circuit: &Circuit, inputs: &[PauliString]) -> Result<Vec<Batch>, SimulatorError> {
    let trajectories = inputs
        .iter()
        .map(|p| propagate(circuit, p))
        .collect::<Result<Vec<_>, _>>()?;
    Ok(batch_trajectories(&trajectories))
}

/// Check that a set of trajectories can share shots.
pub(crate) fn check_disjoint(trajectories: &[&Trajectory]) -> Result<(), SimulatorError> {
    let Some(first) = trajectories.first() else {
        return Ok(());
    };
    let mut ins = vec![0u64; first.input.support_mask().len()];
    let mut outs = ins.clone();
    for t in trajectories {
        let input = t.input.support_mask();
        let output = t.output.support_mask();
        if let Some(q) = overlaps(&ins, &input).or_else(|| overlaps(&outs, &output)) {
            return Err(SimulatorError::OverlappingBatch(q));
        }
        or_into(&mut ins, &input);
        or_into(&mut outs, &output);
    }
    Ok(())
}
