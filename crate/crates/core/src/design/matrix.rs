use std::collections::HashMap;
use std::fmt;

use rayon::prelude::*;

use super::DesignError;
use crate::clifford::{propagate, Circuit, GateIdentity};
use crate::noise::{GateInventory, NoiseModel};
use crate::pauli::{PauliIndex, PauliString};

/// A (gate, Pauli) column. The gate is stored under its noise key.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Variable {
    pub gate: GateIdentity,
    pub label: PauliIndex,
}

impl fmt::Display for Variable {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.gate.variable_name(self.label))
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct RowKey {
    pub circuit_id: usize,
    pub input: PauliString,
}

impl fmt::Display for RowKey {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "circuit {} input {}", self.circuit_id, self.input)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum InventoryMode {
    /// Variables met outside the inventory become new columns.
    Extend,
    /// Variables met outside the inventory are an error.
    Frozen,
}

/// Sparse non-negative integer matrix, stored by rows.
#[derive(Debug, Clone, PartialEq)]
pub struct DesignMatrix {
    rows: Vec<RowKey>,
    columns: Vec<Variable>,
    column_index: HashMap<Variable, usize>,
    /// Per row, `(column, count)` sorted by column.
    entries: Vec<Vec<(u32, u32)>>,
}

fn inventory_columns(inventory: &GateInventory) -> Vec<Variable> {
    let mut cols = Vec::with_capacity(inventory.parameter_count());
    for g in &inventory.gates {
        let g = g.noise_key();
        for b in 1..PauliIndex::count(g.arity()) {
            cols.push(Variable { gate: g.clone(), label: PauliIndex(b as u16) });
        }
    }
    for &q in &inventory.measured {
        for b in 1..4 {
            cols.push(Variable { gate: GateIdentity::meas(q), label: PauliIndex(b) });
        }
    }
    cols
}

/// Assemble `A` for the given rows. `circuits[i]` is circuit id `i`. Columns
/// start from every non-identity variable of `inventory`, in inventory order.
pub fn build_design(
    circuits: &[Circuit],
    rows: &[RowKey],
    inventory: &GateInventory,
    mode: InventoryMode,
) -> Result<DesignMatrix, DesignError> {
    let trajectories = rows
        .par_iter()
        .map(|row| {
            let c = circuits.get(row.circuit_id).ok_or(DesignError::UnknownCircuit(row.circuit_id))?;
            let t = propagate(c, &row.input)?;
            Ok(t.steps
                .into_iter()
                .map(|s| Variable { gate: s.gate.noise_key(), label: s.label })
                .collect::<Vec<_>>())
        })
        .collect::<Result<Vec<_>, DesignError>>()?;

    let mut columns = inventory_columns(inventory);
    let mut column_index: HashMap<Variable, usize> = columns.iter().cloned().enumerate().map(|(i, v)| (v, i)).collect();
    let mut entries = Vec::with_capacity(rows.len());
    for steps in trajectories {
        let mut row: Vec<(u32, u32)> = Vec::with_capacity(steps.len());
        for v in steps {
            let col = match column_index.get(&v) {
                Some(&c) => c,
                None if mode == InventoryMode::Frozen => return Err(DesignError::UnknownVariable(v.to_string())),
                None => {
                    // add every label of the new gate so gate vectors stay complete
                    let first = columns.len();
                    let labels = if v.gate.kind().is_measurement() { 4 } else { PauliIndex::count(v.gate.arity()) };
                    for b in 1..labels {
                        let var = Variable { gate: v.gate.clone(), label: PauliIndex(b as u16) };
                        column_index.insert(var.clone(), columns.len());
                        columns.push(var);
                    }
                    first + v.label.value() - 1
                }
            };
            row.push((col as u32, 1));
        }
        row.sort_unstable();
        let mut merged: Vec<(u32, u32)> = Vec::with_capacity(row.len());
        for (c, k) in row {
            match merged.last_mut() {
                Some(last) if last.0 == c => last.1 += k,
                _ => merged.push((c, k)),
            }
        }
        entries.push(merged);
    }
    Ok(DesignMatrix { rows: rows.to_vec(), columns, column_index, entries })
}

impl DesignMatrix {
    /// Matrix from explicit sparse rows, mainly for tests.
    pub fn from_parts(rows: Vec<RowKey>, columns: Vec<Variable>, entries: Vec<Vec<(u32, u32)>>) -> DesignMatrix {
        let column_index = columns.iter().cloned().enumerate().map(|(i, v)| (v, i)).collect();
        DesignMatrix { rows, columns, column_index, entries }
    }

    pub fn row_count(&self) -> usize {
        self.rows.len()
    }

    pub fn column_count(&self) -> usize {
        self.columns.len()
    }

    pub fn rows(&self) -> &[RowKey] {
        &self.rows
    }

    pub fn columns(&self) -> &[Variable] {
        &self.columns
    }

    pub fn row(&self, mu: usize) -> &[(u32, u32)] {
        &self.entries[mu]
    }

    pub fn column_of(&self, v: &Variable) -> Option<usize> {
        self.column_index.get(v).copied()
    }

    pub fn nnz(&self) -> usize {
        self.entries.iter().map(Vec::len).sum()
    }

    /// Columns without any nonzero entry.
    pub fn empty_columns(&self) -> Vec<usize> {
        let mut seen = vec![false; self.columns.len()];
        for row in &self.entries {
            for &(c, _) in row {
                seen[c as usize] = true;
            }
        }
        seen.iter().enumerate().filter(|(_, s)| !**s).map(|(c, _)| c).collect()
    }

    /// `y = A x`.
    pub fn apply(&self, x: &[f64]) -> Vec<f64> {
        self.entries
            .iter()
            .map(|row| row.iter().map(|&(c, k)| k as f64 * x[c as usize]).sum())
            .collect()
    }

    /// `A^T y`.
    pub fn apply_transpose(&self, y: &[f64]) -> Vec<f64> {
        let mut out = vec![0.0; self.columns.len()];
        for (row, &v) in self.entries.iter().zip(y) {
            for &(c, k) in row {
                out[c as usize] += k as f64 * v;
            }
        }
        out
    }

    /// Keep only the listed rows, in the given order.
    pub fn select_rows(&self, keep: &[usize]) -> DesignMatrix {
        DesignMatrix {
            rows: keep.iter().map(|&i| self.rows[i].clone()).collect(),
            columns: self.columns.clone(),
            column_index: self.column_index.clone(),
            entries: keep.iter().map(|&i| self.entries[i].clone()).collect(),
        }
    }

    pub fn to_dense(&self) -> nalgebra::DMatrix<f64> {
        let mut a = nalgebra::DMatrix::zeros(self.rows.len(), self.columns.len());
        for (mu, row) in self.entries.iter().enumerate() {
            for &(c, k) in row {
                a[(mu, c as usize)] = k as f64;
            }
        }
        a
    }

    /// `x_ν = -ln λ_ν` under a known noise model.
    pub fn true_parameters(&self, noise: &NoiseModel) -> Result<Vec<f64>, DesignError> {
        self.columns
            .iter()
            .map(|v| Ok(-noise.eigenvalue(&v.gate, v.label)?.ln()))
            .collect()
    }
}
