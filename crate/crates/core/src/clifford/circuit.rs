//! Gate identities, layered circuits and the line-oriented circuit text format.
//!
//! ```text
//! qubits 4
//! H 0; CX 2 3
//! S_DAG 1; CX 3 2
//! measure
//! ```

use std::fmt;
use std::str::FromStr;
use std::sync::Arc;

use super::gates::GateKind;
use super::CliffordError;

const NO_GATE: u32 = u32::MAX;

/// A gate placed on concrete qubits, optionally tagged with a context label
/// that separates correlated-group variants of the same gate.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct GateIdentity {
    kind: GateKind,
    qubits: [usize; 2],
    context: Option<Arc<str>>,
}

impl GateIdentity {
    pub fn new(kind: GateKind, qubits: &[usize]) -> Result<GateIdentity, CliffordError> {
        if qubits.len() != kind.arity() {
            return Err(CliffordError::Arity {
                gate: kind.to_string(),
                expected: kind.arity(),
                got: qubits.len(),
            });
        }
        if kind.arity() == 2 && qubits[0] == qubits[1] {
            return Err(CliffordError::DuplicateQubit(qubits[0]));
        }
        let mut q = [0; 2];
        q[..qubits.len()].copy_from_slice(qubits);
        Ok(GateIdentity {
            kind,
            qubits: q,
            context: None,
        })
    }

    pub fn meas(qubit: usize) -> GateIdentity {
        GateIdentity {
            kind: GateKind::Meas,
            qubits: [qubit, 0],
            context: None,
        }
    }

    pub fn with_context(mut self, context: &str) -> GateIdentity {
        self.context = Some(Arc::from(context));
        self
    }

    #[inline]
    pub fn kind(&self) -> GateKind {
        self.kind
    }

    #[inline]
    pub fn qubits(&self) -> &[usize] {
        &self.qubits[..self.kind.arity()]
    }

    pub fn context(&self) -> Option<&str> {
        self.context.as_deref()
    }

    pub fn arity(&self) -> usize {
        self.kind.arity()
    }

    pub fn inverse(&self) -> GateIdentity {
        GateIdentity {
            kind: self.kind.inverse(),
            ..self.clone()
        }
    }

    /// Identity under which this gate's noise channel is looked up.
    pub fn noise_key(&self) -> GateIdentity {
        GateIdentity {
            kind: self.kind.noise_class(),
            ..self.clone()
        }
    }

    /// Rendering of a (gate, Pauli) variable, e.g. `CX 4 5 XZ` or `MEAS 7 Z`.
    pub fn variable_name(&self, label: crate::pauli::PauliIndex) -> String {
        format!("{self} {}", label.render(self.arity()))
    }
}

impl fmt::Display for GateIdentity {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.kind)?;
        for q in self.qubits() {
            write!(f, " {q}")?;
        }
        if let Some(ctx) = &self.context {
            write!(f, " @{ctx}")?;
        }
        Ok(())
    }
}

impl fmt::Debug for GateIdentity {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "GateIdentity({self})")
    }
}

impl FromStr for GateIdentity {
    type Err = CliffordError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let mut tokens = s.split_whitespace();
        let name = tokens
            .next()
            .ok_or_else(|| CliffordError::Parse { line: 0, message: "empty gate".into() })?;
        let kind: GateKind = name
            .parse()
            .map_err(|message| CliffordError::Parse { line: 0, message })?;
        let mut qubits = Vec::new();
        let mut context = None;
        for tok in tokens {
            if let Some(ctx) = tok.strip_prefix('@') {
                context = Some(ctx.to_string());
            } else {
                qubits.push(tok.parse::<usize>().map_err(|_| CliffordError::Parse {
                    line: 0,
                    message: format!("bad qubit index {tok:?} in {s:?}"),
                })?);
            }
        }
        let id = GateIdentity::new(kind, &qubits)?;
        Ok(match context {
            Some(ctx) => id.with_context(&ctx),
            None => id,
        })
    }
}

/// Parse a (gate, label) variable name such as `CX 4 5 XZ` or `MEAS 7 Z`.
pub fn parse_variable(s: &str) -> Result<(GateIdentity, crate::pauli::PauliIndex), CliffordError> {
    let (gate, label) = s
        .trim()
        .rsplit_once(' ')
        .ok_or_else(|| CliffordError::Parse { line: 0, message: format!("bad variable {s:?}") })?;
    let gate: GateIdentity = gate.parse()?;
    let (label, k) = crate::pauli::PauliIndex::parse(label)
        .map_err(|e| CliffordError::Parse { line: 0, message: e.to_string() })?;
    if k != gate.arity() {
        return Err(CliffordError::Parse {
            line: 0,
            message: format!("label arity mismatch in {s:?}"),
        });
    }
    Ok((gate, label))
}

/// Layered Clifford circuit on `n` qubits with an implicit terminal
/// measurement of every qubit.
#[derive(Clone, PartialEq, Eq)]
pub struct Circuit {
    n: usize,
    layers: Vec<Vec<GateIdentity>>,
    owners: Vec<Vec<u32>>,
}

impl Circuit {
    pub fn new(n: usize, layers: Vec<Vec<GateIdentity>>) -> Result<Circuit, CliffordError> {
        if n == 0 {
            return Err(CliffordError::Parse { line: 0, message: "circuit needs at least one qubit".into() });
        }
        let mut owners = Vec::with_capacity(layers.len());
        for (li, layer) in layers.iter().enumerate() {
            let mut owner = vec![NO_GATE; n];
            for (gi, gate) in layer.iter().enumerate() {
                if gate.kind().is_measurement() {
                    return Err(CliffordError::MeasurementInLayer(li));
                }
                for &q in gate.qubits() {
                    if q >= n {
                        return Err(CliffordError::QubitOutOfRange { qubit: q, n });
                    }
                    if owner[q] != NO_GATE {
                        return Err(CliffordError::OverlappingSupport { layer: li, qubit: q });
                    }
                    owner[q] = gi as u32;
                }
            }
            owners.push(owner);
        }
        Ok(Circuit { n, layers, owners })
    }

    pub fn empty(n: usize) -> Circuit {
        Circuit::new(n, Vec::new()).expect("valid")
    }

    #[inline]
    pub fn num_qubits(&self) -> usize {
        self.n
    }

    /// Number of gate layers, excluding the terminal measurement.
    pub fn depth(&self) -> usize {
        self.layers.len()
    }

    pub fn layers(&self) -> &[Vec<GateIdentity>] {
        &self.layers
    }

    /// Index of the gate in `layer` acting on `qubit`, if any.
    #[inline]
    pub fn gate_at(&self, layer: usize, qubit: usize) -> Option<usize> {
        let g = self.owners[layer][qubit];
        (g != NO_GATE).then_some(g as usize)
    }

    pub fn gates(&self) -> impl Iterator<Item = &GateIdentity> {
        self.layers.iter().flatten()
    }

    pub fn gate_count(&self) -> usize {
        self.layers.iter().map(Vec::len).sum()
    }

    /// Layer-reversed circuit with every gate inverted.
    pub fn inverse(&self) -> Circuit {
        let layers = self
            .layers
            .iter()
            .rev()
            .map(|layer| layer.iter().map(GateIdentity::inverse).collect())
            .collect();
        Circuit::new(self.n, layers).expect("inverse of a valid circuit is valid")
    }

    /// Sequential composition: `self` first, then `other`.
    pub fn then(&self, other: &Circuit) -> Result<Circuit, CliffordError> {
        if self.n != other.n {
            return Err(CliffordError::Width { expected: self.n, got: other.n });
        }
        let mut layers = self.layers.clone();
        layers.extend(other.layers.iter().cloned());
        Circuit::new(self.n, layers)
    }

    pub fn to_text(&self) -> String {
        let mut out = format!("qubits {}\n", self.n);
        for layer in &self.layers {
            let line: Vec<String> = layer.iter().map(ToString::to_string).collect();
            out.push_str(&line.join("; "));
            out.push('\n');
        }
        out.push_str("measure\n");
        out
    }

    pub fn from_text(text: &str) -> Result<Circuit, CliffordError> {
        let mut n = None;
        let mut layers = Vec::new();
        let mut measured = false;
        for (idx, raw) in text.lines().enumerate() {
            let line_no = idx + 1;
            let line = raw.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            if measured {
                return Err(CliffordError::Parse { line: line_no, message: "content after measure".into() });
            }
            if n.is_none() {
                let width = line
                    .strip_prefix("qubits")
                    .and_then(|rest| rest.trim().parse::<usize>().ok())
                    .ok_or_else(|| CliffordError::Parse {
                        line: line_no,
                        message: "expected header \"qubits N\"".into(),
                    })?;
                n = Some(width);
                continue;
            }
            if line == "measure" {
                measured = true;
                continue;
            }
            let layer = line
                .split(';')
                .map(str::trim)
                .filter(|g| !g.is_empty())
                .map(|g| {
                    g.parse::<GateIdentity>().map_err(|e| match e {
                        CliffordError::Parse { message, .. } => CliffordError::Parse { line: line_no, message },
                        other => other,
                    })
                })
                .collect::<Result<Vec<_>, _>>()?;
            layers.push(layer);
        }
        let n = n.ok_or(CliffordError::Parse { line: 0, message: "missing header".into() })?;
        if !measured {
            return Err(CliffordError::Parse { line: 0, message: "missing terminal \"measure\" line".into() });
        }
        Circuit::new(n, layers)
    }
}

impl fmt::Debug for Circuit {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Circuit(n={}, depth={})", self.n, self.depth())
    }
}
