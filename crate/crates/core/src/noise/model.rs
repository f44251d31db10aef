//! Device noise models: one Pauli channel per gate, one readout flip
//! probability per (qubit, measurement basis).

use std::collections::{BTreeMap, BTreeSet};

use rand::Rng;
use serde::{Deserialize, Serialize};

use super::{NoiseError, PauliChannel};
use crate::clifford::{Circuit, GateIdentity};
use crate::pauli::{Pauli, PauliIndex};
use crate::seeding;

/// Gates (by noise key) and measured qubits that a set of circuits uses.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct GateInventory {
    pub gates: BTreeSet<GateIdentity>,
    pub measured: BTreeSet<usize>,
}

impl GateInventory {
    pub fn from_circuits<'a>(circuits: impl IntoIterator<Item = &'a Circuit>) -> GateInventory {
        let mut inv = GateInventory::default();
        for c in circuits {
            inv.gates.extend(c.gates().map(GateIdentity::noise_key));
            inv.measured.extend(0..c.num_qubits());
        }
        inv
    }

    /// Modeled gates, measurements included (one per measured qubit).
    pub fn gate_count(&self) -> usize {
        self.gates.len() + self.measured.len()
    }

    /// Number of non-identity (gate, Pauli) parameters.
    pub fn parameter_count(&self) -> usize {
        self.gates
            .iter()
            .map(|g| PauliIndex::count(g.arity()) - 1)
            .sum::<usize>()
            + 3 * self.measured.len()
    }
}

/// Closed interval a total error probability is drawn from.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Range(pub f64, pub f64);

impl Range {
    fn validate(self, name: &str, upper_limit: f64) -> Result<(), NoiseError> {
        let Range(lo, hi) = self;
        if !(lo >= 0.0) || !(hi < upper_limit) || lo > hi {
            return Err(NoiseError::InvalidRange { class: name.to_string(), lo, hi });
        }
        Ok(())
    }

    fn draw(self, rng: &mut impl Rng) -> f64 {
        if self.1 > self.0 {
            rng.random_range(self.0..=self.1)
        } else {
            self.0
        }
    }
}

/// Per-class error magnitudes used to draw random noise models. Defaults are
/// of the order reported for superconducting devices: 0.05–0.2% for one-qubit
/// gates, 0.4–1% for two-qubit gates, 1–3% readout.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct NoiseRanges {
    pub single: Range,
    pub two: Range,
    pub readout: Range,
}

impl Default for NoiseRanges {
    fn default() -> Self {
        NoiseRanges {
            single: Range(0.0005, 0.002),
            two: Range(0.004, 0.01),
            readout: Range(0.01, 0.03),
        }
    }
}

impl NoiseRanges {
    pub fn noiseless() -> NoiseRanges {
        NoiseRanges {
            single: Range(0.0, 0.0),
            two: Range(0.0, 0.0),
            readout: Range(0.0, 0.0),
        }
    }

    pub fn validate(&self) -> Result<(), NoiseError> {
        self.single.validate("single", 1.0)?;
        self.two.validate("two", 1.0)?;
        self.readout.validate("readout", 0.5)
    }

    pub(crate) fn class(&self, name: &str) -> Result<Range, NoiseError> {
        match name {
            "single" => Ok(self.single),
            "two" => Ok(self.two),
            "readout" => Ok(self.readout),
            other => Err(NoiseError::UnknownClass(other.to_string())),
        }
    }

    pub(crate) fn class_for(gate: &GateIdentity) -> &'static str {
        if gate.arity() == 1 {
            "single"
        } else {
            "two"
        }
    }
}

/// Draw a channel with total error in `range`, spread over the non-identity
/// Paulis by normalized uniform weights.
pub(crate) fn draw_channel(k: usize, range: Range, rng: &mut impl Rng) -> PauliChannel {
    let eps = range.draw(rng);
    let len = PauliIndex::count(k);
    if eps == 0.0 {
        return PauliChannel::identity(k);
    }
    let weights: Vec<f64> = (1..len).map(|_| rng.random::<f64>()).collect();
    let total: f64 = weights.iter().sum();
    let mut rates = Vec::with_capacity(len);
    rates.push(0.0);
    rates.extend(weights.iter().map(|w| eps * w / total));
    rates[0] = 1.0 - rates[1..].iter().sum::<f64>();
    PauliChannel::new(rates).expect("drawn channel is normalized")
}

pub(crate) fn gate_stream(seed: u64, gate: &GateIdentity) -> rand_chacha::ChaCha8Rng {
    seeding::substream(seed, &format!("noise/{gate}"), &[])
}

pub(crate) fn readout_stream(seed: u64, qubit: usize, basis: Pauli) -> rand_chacha::ChaCha8Rng {
    seeding::substream(seed, &format!("noise/MEAS {qubit} {basis}"), &[])
}

/// Noise on every gate (keyed by noise class) and on every readout.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct NoiseModel {
    gates: BTreeMap<GateIdentity, PauliChannel>,
    readout: BTreeMap<(usize, Pauli), f64>,
}

impl NoiseModel {
    pub fn new() -> NoiseModel {
        NoiseModel::default()
    }

    pub fn noiseless(inventory: &GateInventory) -> NoiseModel {
        let mut nm = NoiseModel::new();
        for g in &inventory.gates {
            nm.gates.insert(g.clone(), PauliChannel::identity(g.arity()));
        }
        for &q in &inventory.measured {
            for b in Pauli::NON_IDENTITY {
                nm.readout.insert((q, b), 0.0);
            }
        }
        nm
    }

    pub fn set_channel(&mut self, gate: &GateIdentity, channel: PauliChannel) -> Result<(), NoiseError> {
        if gate.kind().is_measurement() || channel.support_size() != gate.arity() {
            return Err(NoiseError::Arity { gate: gate.to_string(), k: channel.support_size() });
        }
        self.gates.insert(gate.noise_key(), channel);
        Ok(())
    }

    pub fn set_readout(&mut self, qubit: usize, basis: Pauli, flip: f64) -> Result<(), NoiseError> {
        if basis == Pauli::I || !(0.0..0.5).contains(&flip) {
            return Err(NoiseError::InvalidReadout { qubit, value: flip });
        }
        self.readout.insert((qubit, basis), flip);
        Ok(())
    }

    pub fn channel(&self, gate: &GateIdentity) -> Result<&PauliChannel, NoiseError> {
        self.gates
            .get(&gate.noise_key())
            .ok_or_else(|| NoiseError::MissingGate(gate.noise_key().to_string()))
    }

    pub fn readout(&self, qubit: usize, basis: Pauli) -> Result<f64, NoiseError> {
        self.readout
            .get(&(qubit, basis))
            .copied()
            .ok_or_else(|| NoiseError::MissingGate(format!("MEAS {qubit} {basis}")))
    }

    /// Eigenvalue of the (gate, label) variable; for measurements `1 - 2 q`.
    pub fn eigenvalue(&self, gate: &GateIdentity, label: PauliIndex) -> Result<f64, NoiseError> {
        if gate.kind().is_measurement() {
            if label.is_identity() {
                return Ok(1.0);
            }
            Ok(1.0 - 2.0 * self.readout(gate.qubits()[0], label.slot(0))?)
        } else {
            Ok(self.channel(gate)?.eigenvalue(label))
        }
    }

    pub fn gate_channels(&self) -> impl Iterator<Item = (&GateIdentity, &PauliChannel)> {
        self.gates.iter()
    }

    pub fn readouts(&self) -> impl Iterator<Item = ((usize, Pauli), f64)> + '_ {
        self.readout.iter().map(|(&k, &v)| (k, v))
    }

    /// Check that every gate and measurement of the inventory has an entry.
    pub fn covers(&self, inventory: &GateInventory) -> Result<(), NoiseError> {
        for g in &inventory.gates {
            self.channel(g)?;
        }
        for &q in &inventory.measured {
            for b in Pauli::NON_IDENTITY {
                self.readout(q, b)?;
            }
        }
        Ok(())
    }

    /// Full eigenvalue vector (identity label included) of a gate, or of the
    /// diagonal readout channel of a measurement.
    pub fn eigenvalues_of(&self, gate: &GateIdentity) -> Result<Vec<f64>, NoiseError> {
        if gate.kind().is_measurement() {
            return (0..4u16).map(|b| self.eigenvalue(gate, PauliIndex(b))).collect();
        }
        Ok(self.channel(gate)?.eigenvalues().to_vec())
    }

    /// Rate vector of a gate. For a measurement these are the rates of the
    /// Pauli channel with the readout eigenvalues, which need not be
    /// non-negative since per-basis flips are drawn independently.
    pub fn rates_of(&self, gate: &GateIdentity) -> Result<Vec<f64>, NoiseError> {
        if gate.kind().is_measurement() {
            return Ok(super::rates_from_eigenvalues(&self.eigenvalues_of(gate)?, f64::INFINITY)?.rates);
        }
        Ok(self.channel(gate)?.rates().to_vec())
    }
}

/// Draw a random model for `inventory`. Each gate and readout uses its own
/// substream keyed by its name, so the draw for one gate does not depend on
/// which other gates are present.
pub fn random_noise_model(inventory: &GateInventory, ranges: &NoiseRanges, seed: u64) -> Result<NoiseModel, NoiseError> {
    ranges.validate()?;
    let mut nm = NoiseModel::new();
    for g in &inventory.gates {
        let range = ranges.class(NoiseRanges::class_for(g))?;
        let channel = draw_channel(g.arity(), range, &mut gate_stream(seed, g));
        nm.gates.insert(g.clone(), channel);
    }
    for &q in &inventory.measured {
        for b in Pauli::NON_IDENTITY {
            let flip = ranges.readout.draw(&mut readout_stream(seed, q, b));
            nm.readout.insert((q, b), flip);
        }
    }
    Ok(nm)
}
