//! TOML noise-model files.
//!
//! ```toml
//! seed = 7                      # resolves class references
//!
//! [ranges]                      # optional, defaults shown
//! single = [0.0005, 0.002]
//! two = [0.004, 0.01]
//! readout = [0.01, 0.03]
//!
//! [gates]
//! "CX 4 5" = [0.99, 0.001, ...] # explicit rates in label order
//! "H 3" = "single"              # drawn from the class range
//!
//! [readout]
//! "MEAS 7 Z" = 0.02
//! "MEAS 7 X" = "readout"
//! ```

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use super::model::{draw_channel, gate_stream, readout_stream};
use super::{NoiseError, NoiseModel, NoiseRanges, PauliChannel};
use crate::clifford::{GateIdentity, GateKind};
use crate::pauli::Pauli;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum GateEntry {
    Rates(Vec<f64>),
    Class(String),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum ReadoutEntry {
    Flip(f64),
    Class(String),
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct NoiseFile {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub ranges: Option<NoiseRanges>,
    #[serde(default)]
    pub gates: BTreeMap<String, GateEntry>,
    #[serde(default)]
    pub readout: BTreeMap<String, ReadoutEntry>,
}

fn parse_readout_key(key: &str) -> Result<(usize, Pauli), NoiseError> {
    let bad = || NoiseError::File(format!("bad readout key {key:?}, expected \"MEAS q B\""));
    let mut parts = key.split_whitespace();
    if parts.next() != Some("MEAS") {
        return Err(bad());
    }
    let qubit = parts.next().and_then(|q| q.parse().ok()).ok_or_else(bad)?;
    let basis = parts
        .next()
        .and_then(|b| b.chars().next().filter(|_| b.len() == 1))
        .and_then(Pauli::from_letter)
        .filter(|&b| b != Pauli::I)
        .ok_or_else(bad)?;
    if parts.next().is_some() {
        return Err(bad());
    }
    Ok((qubit, basis))
}

impl NoiseFile {
    pub fn from_model(model: &NoiseModel) -> NoiseFile {
        NoiseFile {
            seed: None,
            ranges: None,
            gates: model
                .gate_channels()
                .map(|(g, ch)| (g.to_string(), GateEntry::Rates(ch.rates().to_vec())))
                .collect(),
            readout: model
                .readouts()
                .map(|((q, b), flip)| (format!("MEAS {q} {b}"), ReadoutEntry::Flip(flip)))
                .collect(),
        }
    }

    pub fn resolve(&self) -> Result<NoiseModel, NoiseError> {
        let ranges = self.ranges.unwrap_or_default();
        ranges.validate()?;
        let need_seed = || {
            self.seed
                .ok_or_else(|| NoiseError::File("class references need a top-level seed".into()))
        };
        let mut model = NoiseModel::new();
        for (key, entry) in &self.gates {
            let gate: GateIdentity = key.parse().map_err(|e| NoiseError::File(format!("{key:?}: {e}")))?;
            if gate.kind() == GateKind::Meas {
                return Err(NoiseError::File(format!("{key:?}: measurements belong in [readout]")));
            }
            let channel = match entry {
                GateEntry::Rates(rates) => PauliChannel::new(rates.clone())?,
                GateEntry::Class(class) => {
                    let range = ranges.class(class)?;
                    draw_channel(gate.arity(), range, &mut gate_stream(need_seed()?, &gate.noise_key()))
                }
            };
            model.set_channel(&gate, channel)?;
        }
        for (key, entry) in &self.readout {
            let (qubit, basis) = parse_readout_key(key)?;
            let flip = match entry {
                ReadoutEntry::Flip(f) => *f,
                ReadoutEntry::Class(class) => {
                    let range = ranges.class(class)?;
                    let mut rng = readout_stream(need_seed()?, qubit, basis);
                    if range.1 > range.0 {
                        rand::Rng::random_range(&mut rng, range.0..=range.1)
                    } else {
                        range.0
                    }
                }
            };
            model.set_readout(qubit, basis, flip)?;
        }
        Ok(model)
    }
}

pub fn save_noise_model(model: &NoiseModel) -> String {
    toml::to_string(&NoiseFile::from_model(model)).expect("noise file serializes")
}

pub fn load_noise_model(text: &str) -> Result<NoiseModel, NoiseError> {
    let file: NoiseFile = toml::from_str(text).map_err(|e| NoiseError::File(e.to_string()))?;
    file.resolve()
}
