//! Random 1D mirror circuits, input Pauli selection and randomized-compiling
//! instances.

use std::fmt;

use rand::seq::IndexedRandom;
use rand::Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::clifford::{propagate, Circuit, CliffordError, GateIdentity, GateKind, SingleKind};
use crate::pauli::{Pauli, PauliString};
use crate::seeding;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum GeneratorError {
    #[error("invalid design: {0}")]
    Invalid(String),
    #[error(transparent)]
    Clifford(#[from] CliffordError),
}

/// Gates the random layers draw from, uniformly.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GateSet {
    pub single: Vec<String>,
    /// `CX` (random direction) and/or `CZ`.
    pub two: Vec<String>,
}

impl Default for GateSet {
    fn default() -> Self {
        GateSet {
            single: SingleKind::COSETS.iter().map(|k| k.name().to_string()).collect(),
            two: vec!["CX".into()],
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
struct ResolvedGateSet {
    single: Vec<SingleKind>,
    two: Vec<GateKind>,
}

impl GateSet {
    fn resolve(&self) -> Result<ResolvedGateSet, GeneratorError> {
        let single = self
            .single
            .iter()
            .map(|s| SingleKind::from_name(s).ok_or_else(|| GeneratorError::Invalid(format!("unknown single-qubit gate {s:?}"))))
            .collect::<Result<Vec<_>, _>>()?;
        let two = self
            .two
            .iter()
            .map(|s| match s.parse::<GateKind>() {
                Ok(k @ (GateKind::Cx | GateKind::Cz)) => Ok(k),
                _ => Err(GeneratorError::Invalid(format!("unsupported two-qubit gate {s:?}"))),
            })
            .collect::<Result<Vec<_>, _>>()?;
        if single.is_empty() || two.is_empty() {
            return Err(GeneratorError::Invalid("gate set needs single- and two-qubit gates".into()));
        }
        Ok(ResolvedGateSet { single, two })
    }
}

/// Which input Paulis a circuit is probed with.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct InputPolicy {
    /// Add the nearest-neighbour weight-2 Paulis.
    pub weight_two: bool,
    /// Drop inputs whose ideal output has larger weight.
    pub weight_cap: usize,
}

impl Default for InputPolicy {
    fn default() -> Self {
        InputPolicy { weight_two: false, weight_cap: 10 }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentDesignSpec {
    pub n: usize,
    /// Mirror half-depths, one per circuit.
    pub half_depths: Vec<usize>,
    pub pad_depth: usize,
    /// Indices of the circuits that also get weight-2 inputs.
    pub weight_two_circuits: Vec<usize>,
    pub weight_cap: usize,
    #[serde(default)]
    pub gate_set: GateSet,
    pub seed: u64,
}

impl ExperimentDesignSpec {
    pub fn circuit_count(&self) -> usize {
        self.half_depths.len()
    }

    pub fn validate(&self) -> Result<(), GeneratorError> {
        let bad = |m: String| Err(GeneratorError::Invalid(m));
        if self.n < 2 {
            return bad(format!("need at least 2 qubits, got {}", self.n));
        }
        if self.half_depths.is_empty() {
            return bad("need at least one circuit".into());
        }
        if self.half_depths.contains(&0) {
            return bad("half-depths must be at least 1".into());
        }
        if let Some(&i) = self.weight_two_circuits.iter().find(|&&i| i >= self.circuit_count()) {
            return bad(format!("weight-2 circuit index {i} out of range"));
        }
        if self.weight_cap == 0 {
            return bad("weight cap must be at least 1".into());
        }
        self.gate_set.resolve()?;
        Ok(())
    }

    pub fn policy(&self, circuit: usize) -> InputPolicy {
        InputPolicy {
            weight_two: self.weight_two_circuits.contains(&circuit),
            weight_cap: self.weight_cap,
        }
    }
}

/// `count` half-depths spaced geometrically from `min` to `max`.
pub fn geometric_schedule(count: usize, min: usize, max: usize) -> Vec<usize> {
    if count == 0 {
        return Vec::new();
    }
    if count == 1 {
        return vec![min];
    }
    let ratio = (max as f64 / min as f64).powf(1.0 / (count - 1) as f64);
    (0..count)
        .map(|i| ((min as f64) * ratio.powi(i as i32)).round() as usize)
        .map(|d| d.clamp(min, max))
        .collect()
}

/// `k` circuit indices spread evenly over `0..count`.
pub fn spread_indices(count: usize, k: usize) -> Vec<usize> {
    let k = k.min(count);
    (0..k).map(|j| j * count / k).collect()
}

fn single_layer(n: usize, gates: &ResolvedGateSet, rng: &mut impl Rng) -> Vec<GateIdentity> {
    (0..n)
        .map(|q| {
            let kind = *gates.single.choose(rng).expect("non-empty");
            GateIdentity::new(GateKind::Single(kind), &[q]).expect("one qubit")
        })
        .collect()
}

fn bond_layer(n: usize, parity: usize, gates: &ResolvedGateSet, rng: &mut impl Rng) -> Vec<GateIdentity> {
    (parity..n.saturating_sub(1))
        .step_by(2)
        .map(|a| {
            let kind = *gates.two.choose(rng).expect("non-empty");
            let pair = if kind == GateKind::Cx && rng.random_bool(0.5) { [a + 1, a] } else { [a, a + 1] };
            GateIdentity::new(kind, &pair).expect("distinct qubits")
        })
        .collect()
}

/// Alternating single-qubit and brickwork layers, starting with a
/// single-qubit layer.
fn random_layers(n: usize, depth: usize, gates: &ResolvedGateSet, rng: &mut impl Rng) -> Vec<Vec<GateIdentity>> {
    (0..depth)
        .map(|t| if t % 2 == 0 { single_layer(n, gates, rng) } else { bond_layer(n, (t / 2) % 2, gates, rng) })
        .collect()
}

/// `U U† V` with `U` of depth `half_depth` and a fresh random pad `V` of
/// depth `pad_depth`.
pub fn generate_mirror_circuit(
    n: usize,
    half_depth: usize,
    pad_depth: usize,
    gates: &GateSet,
    rng: &mut impl Rng,
) -> Result<Circuit, GeneratorError> {
    if n < 2 {
        return Err(GeneratorError::Invalid(format!("need at least 2 qubits, got {n}")));
    }
    let gates = gates.resolve()?;
    let u = Circuit::new(n, random_layers(n, half_depth, &gates, rng))?;
    let pad = Circuit::new(n, random_layers(n, pad_depth, &gates, rng))?;
    Ok(u.then(&u.inverse())?.then(&pad)?)
}

/// Candidate inputs in a fixed order: every weight-1 Pauli, then (if enabled)
/// every nearest-neighbour weight-2 Pauli, keeping those whose ideal output
/// weight is within the cap. Returns the kept inputs and the number dropped.
pub fn choose_input_paulis(circuit: &Circuit, policy: InputPolicy) -> (Vec<PauliString>, usize) {
    const LETTERS: [Pauli; 3] = [Pauli::X, Pauli::Y, Pauli::Z];
    let n = circuit.num_qubits();
    let mut candidates = Vec::new();
    for q in 0..n {
        for p in LETTERS {
            candidates.push(PauliString::single(n, q, p));
        }
    }
    if policy.weight_two {
        for q in 0..n.saturating_sub(1) {
            for a in LETTERS {
                for b in LETTERS {
                    let mut s = PauliString::single(n, q, a);
                    s.set(q + 1, b);
                    candidates.push(s);
                }
            }
        }
    }
    let total = candidates.len();
    let kept: Vec<PauliString> = candidates
        .into_iter()
        .filter(|p| propagate(circuit, p).expect("width matches").output.weight() <= policy.weight_cap)
        .collect();
    let dropped = total - kept.len();
    (kept, dropped)
}

/// One generated circuit with its inputs.
#[derive(Debug, Clone, PartialEq)]
pub struct Experiment {
    pub circuit: Circuit,
    pub inputs: Vec<PauliString>,
    /// Inputs removed by the output-weight cap.
    pub dropped_inputs: usize,
}

/// Generate every circuit of the design. Circuit `i` uses its own substream,
/// keyed additionally by `attempt` so that retries draw fresh circuits.
pub fn generate_experiments(spec: &ExperimentDesignSpec, attempt: u64) -> Result<Vec<Experiment>, GeneratorError> {
    spec.validate()?;
    spec.half_depths
        .iter()
        .enumerate()
        .map(|(i, &h)| {
            let mut rng = seeding::substream(spec.seed, "circuit", &[attempt, i as u64]);
            let circuit = generate_mirror_circuit(spec.n, h, spec.pad_depth, &spec.gate_set, &mut rng)?;
            let (inputs, dropped_inputs) = choose_input_paulis(&circuit, spec.policy(i));
            Ok(Experiment { circuit, inputs, dropped_inputs })
        })
        .collect()
}

/// Replace the single-qubit gates on `a` and `b` by one composite gate
/// wherever both occur in the same layer, so that they carry a joint
/// two-qubit channel keyed by `context`.
pub fn fuse_pair(circuit: &Circuit, a: usize, b: usize, context: &str) -> Result<Circuit, GeneratorError> {
    if a == b {
        return Err(GeneratorError::Invalid("cannot fuse a qubit with itself".into()));
    }
    let mut layers = Vec::with_capacity(circuit.depth());
    for (li, layer) in circuit.layers().iter().enumerate() {
        let ga = circuit.gate_at(li, a).map(|g| &layer[g]);
        let gb = circuit.gate_at(li, b).map(|g| &layer[g]);
        let fused = match (ga.map(|g| g.kind()), gb.map(|g| g.kind())) {
            (Some(GateKind::Single(ka)), Some(GateKind::Single(kb))) => {
                Some(GateIdentity::new(GateKind::Pair(ka, kb), &[a, b])?.with_context(context))
            }
            _ => None,
        };
        match fused {
            Some(pair) => {
                let mut out: Vec<GateIdentity> = layer
                    .iter()
                    .filter(|g| g.qubits() != [a] && g.qubits() != [b])
                    .cloned()
                    .collect();
                out.push(pair);
                layers.push(out);
            }
            None => layers.push(layer.clone()),
        }
    }
    Ok(Circuit::new(circuit.num_qubits(), layers)?)
}

/// A circuit with Pauli frame layers: `frames[0]`, layer 0, `frames[1]`, ...,
/// layer `d-1`, `frames[d]`.
#[derive(Debug, Clone, PartialEq)]
pub struct RcInstance {
    pub circuit: Circuit,
    pub frames: Vec<PauliString>,
}

fn uniform_pauli_on(n: usize, qubits: impl Iterator<Item = usize>, rng: &mut impl Rng) -> PauliString {
    let mut p = PauliString::identity(n);
    for q in qubits {
        p.set(q, Pauli::from_code(rng.random_range(0..4)));
    }
    p
}

/// Draw a uniform Pauli on every gate's support before the gate and insert
/// its image after, merging adjacent frames into one layer. Signs are dropped
/// since they are global phases.
pub fn sample_randomized_compiling(circuit: &Circuit, rng: &mut impl Rng) -> RcInstance {
    let n = circuit.num_qubits();
    let mut frames = Vec::with_capacity(circuit.depth() + 1);
    let mut carry = PauliString::identity(n);
    for layer in circuit.layers() {
        let twirl = uniform_pauli_on(n, layer.iter().flat_map(|g| g.qubits().iter().copied()), rng);
        frames.push(carry.multiply(&twirl).expect("same width").unsigned());
        let mut image = twirl;
        for g in layer {
            image = crate::clifford::conjugate_gate(g, &image).expect("gate in range");
        }
        carry = image.unsigned();
    }
    frames.push(carry);
    RcInstance { circuit: circuit.clone(), frames }
}

impl RcInstance {
    /// Circuit text with a `frame P` line before every layer and before the
    /// measurement.
    pub fn to_text(&self) -> String {
        let mut out = format!("qubits {}\n", self.circuit.num_qubits());
        for (layer, frame) in self.circuit.layers().iter().zip(&self.frames) {
            out.push_str(&format!("frame {}\n", frame.unsigned()));
            let line: Vec<String> = layer.iter().map(ToString::to_string).collect();
            out.push_str(&line.join("; "));
            out.push('\n');
        }
        out.push_str(&format!("frame {}\n", self.frames.last().expect("d + 1 frames").unsigned()));
        out.push_str("measure\n");
        out
    }

    pub fn from_text(text: &str) -> Result<RcInstance, GeneratorError> {
        let mut frames = Vec::new();
        let mut plain = String::new();
        for line in text.lines() {
            match line.trim().strip_prefix("frame ") {
                Some(p) => frames.push(
                    p.trim()
                        .parse::<PauliString>()
                        .map_err(|e| GeneratorError::Invalid(format!("bad frame {p:?}: {e}")))?,
                ),
                None => {
                    plain.push_str(line);
                    plain.push('\n');
                }
            }
        }
        let circuit = Circuit::from_text(&plain)?;
        if frames.len() != circuit.depth() + 1 || frames.iter().any(|f| f.num_qubits() != circuit.num_qubits()) {
            return Err(GeneratorError::Invalid("frame count or width does not match the circuit".into()));
        }
        Ok(RcInstance { circuit, frames })
    }
}

impl fmt::Display for RcInstance {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.to_text())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn rng(seed: u64) -> ChaCha8Rng {
        ChaCha8Rng::seed_from_u64(seed)
    }

    #[test]
    fn schedule_and_spread() {
        assert_eq!(geometric_schedule(1, 3, 9), vec![3]);
        let s = geometric_schedule(5, 1, 16);
        assert_eq!(s, vec![1, 2, 4, 8, 16]);
        assert_eq!(spread_indices(19, 5), vec![0, 3, 7, 11, 15]);
        assert_eq!(spread_indices(3, 5), vec![0, 1, 2]);
    }

    #[test]
    fn mirror_without_pad_is_identity() {
        for seed in 0..5 {
            let c = generate_mirror_circuit(6, 7, 0, &GateSet::default(), &mut rng(seed)).unwrap();
            assert_eq!(c.depth(), 14);
            for code in 1..(1u32 << 12) {
                let mut p = PauliString::identity(6);
                for q in 0..6 {
                    p.set(q, Pauli::from_code(((code >> (2 * q)) & 3) as u8));
                }
                let t = propagate(&c, &p).unwrap();
                assert_eq!(t.output, p);
            }
        }
    }

    #[test]
    fn mirror_geometry() {
        let c = generate_mirror_circuit(21, 17, 0, &GateSet::default(), &mut rng(3)).unwrap();
        assert_eq!(c.depth(), 34);
        for layer in c.layers() {
            for g in layer {
                if g.arity() == 2 {
                    let q = g.qubits();
                    assert_eq!(q[0].abs_diff(q[1]), 1);
                }
            }
        }
        let padded = generate_mirror_circuit(21, 17, 5, &GateSet::default(), &mut rng(3)).unwrap();
        assert_eq!(padded.depth(), 39);
        let again = generate_mirror_circuit(21, 17, 5, &GateSet::default(), &mut rng(3)).unwrap();
        assert_eq!(padded, again);
    }

    #[test]
    fn input_enumeration() {
        let c = Circuit::empty(2);
        let (w1, dropped) = choose_input_paulis(&c, InputPolicy::default());
        assert_eq!(dropped, 0);
        let names: Vec<String> = w1.iter().map(|p| p.to_string()).collect();
        assert_eq!(names, ["XI", "YI", "ZI", "IX", "IY", "IZ"]);
        let (w2, _) = choose_input_paulis(&c, InputPolicy { weight_two: true, weight_cap: 6 });
        assert_eq!(w2.len(), 15);
    }

    #[test]
    fn weight_cap_drops_inputs() {
        // CX fan-out spreads X on qubit 0 over all 8 qubits
        let layers = (1..8).map(|t| vec![GateIdentity::new(GateKind::Cx, &[0, t]).unwrap()]).collect();
        let c = Circuit::new(8, layers).unwrap();
        let (inputs, dropped) = choose_input_paulis(&c, InputPolicy { weight_two: false, weight_cap: 6 });
        assert_eq!(dropped, 2); // X and Y on qubit 0
        assert_eq!(inputs.len(), 22);
    }

    #[test]
    fn experiments_are_reproducible() {
        let spec = ExperimentDesignSpec {
            n: 5,
            half_depths: vec![1, 3, 6],
            pad_depth: 5,
            weight_two_circuits: vec![1],
            weight_cap: 6,
            gate_set: GateSet::default(),
            seed: 11,
        };
        let a = generate_experiments(&spec, 0).unwrap();
        assert_eq!(a, generate_experiments(&spec, 0).unwrap());
        assert_ne!(a, generate_experiments(&spec, 1).unwrap());
        assert_eq!(a[0].inputs.len() + a[0].dropped_inputs, 15);
        assert_eq!(a[1].inputs.len() + a[1].dropped_inputs, 15 + 36);
        let mut bad = spec.clone();
        bad.weight_two_circuits = vec![3];
        assert!(bad.validate().is_err());
        bad = spec.clone();
        bad.gate_set.two = vec!["H".into()];
        assert!(bad.validate().is_err());
    }

    #[test]
    fn fuse_pair_builds_composite_gates() {
        let c = Circuit::from_text("qubits 3\nH 0; S 1; SX 2\nCX 0 1\nmeasure\n").unwrap();
        let fused = fuse_pair(&c, 0, 1, "corr").unwrap();
        assert_eq!(fused.to_text(), "qubits 3\nSX 2; H*S 0 1 @corr\nCX 0 1\nmeasure\n");
        let p: PauliString = "XZI".parse().unwrap();
        assert_eq!(propagate(&c, &p).unwrap().output, propagate(&fused, &p).unwrap().output);
    }

    #[test]
    fn rc_instance_round_trip() {
        let c = generate_mirror_circuit(4, 3, 2, &GateSet::default(), &mut rng(1)).unwrap();
        let inst = sample_randomized_compiling(&c, &mut rng(2));
        assert_eq!(inst.frames.len(), c.depth() + 1);
        assert_eq!(RcInstance::from_text(&inst.to_text()).unwrap(), inst);
    }
}
