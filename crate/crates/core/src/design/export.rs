//! Text exports: sparse triplets, row and column maps, per-gate solutions.

use serde::Deserialize;

use super::{DesignError, DesignMatrix, Solution};
use crate::simulator::fmt_real;

/// `mu nu count` per nonzero, zero-based, after a `# rows cols nnz` header.
pub fn write_triplets(a: &DesignMatrix) -> String {
    let mut out = format!("# {} {} {}\n", a.row_count(), a.column_count(), a.nnz());
    for mu in 0..a.row_count() {
        for &(nu, k) in a.row(mu) {
            out.push_str(&format!("{mu} {nu} {k}\n"));
        }
    }
    out
}

pub fn write_row_map(a: &DesignMatrix) -> String {
    let mut out = String::from("mu,circuit_id,input_pauli\n");
    for (mu, r) in a.rows().iter().enumerate() {
        out.push_str(&format!("{mu},{},{}\n", r.circuit_id, r.input));
    }
    out
}

pub fn write_column_map(a: &DesignMatrix) -> String {
    let mut out = String::from("nu,gate_id,pauli\n");
    for (nu, v) in a.columns().iter().enumerate() {
        out.push_str(&format!("{nu},{},{}\n", v.gate, v.label.render(v.gate.arity())));
    }
    out
}

/// One line per (gate, Pauli), identity included. Truth columns appear when
/// the solution carries truth; `tvd` repeats the gate's distance on each of
/// its lines and is empty without truth.
pub fn write_solution_csv(solution: &Solution) -> String {
    let with_truth = solution.gates.iter().any(|g| g.truth.is_some());
    let mut w = csv::Writer::from_writer(Vec::new());
    let mut header = vec!["gate_id", "pauli", "lambda_hat", "p_hat"];
    if with_truth {
        header.extend(["lambda_true", "p_true"]);
    }
    header.push("tvd");
    w.write_record(&header).expect("in-memory write");
    for g in &solution.gates {
        let k = g.gate.arity();
        for b in 0..g.eigenvalues.len() {
            let mut rec = vec![
                g.gate.to_string(),
                crate::pauli::PauliIndex(b as u16).render(k),
                fmt_real(g.eigenvalues[b]),
                fmt_real(g.rates[b]),
            ];
            match &g.truth {
                Some(t) => rec.extend([fmt_real(t.eigenvalues[b]), fmt_real(t.rates[b]), fmt_real(t.tvd)]),
                None if with_truth => rec.extend([String::new(), String::new(), String::new()]),
                None => rec.push(String::new()),
            }
            w.write_record(&rec).expect("in-memory write");
        }
    }
    String::from_utf8(w.into_inner().expect("in-memory flush")).expect("ascii")
}

#[derive(Debug, Clone, PartialEq, Deserialize)]
pub struct SolutionRow {
    pub gate_id: String,
    pub pauli: String,
    pub lambda_hat: f64,
    pub p_hat: f64,
    #[serde(default)]
    pub lambda_true: Option<f64>,
    #[serde(default)]
    pub p_true: Option<f64>,
    #[serde(default)]
    pub tvd: Option<f64>,
}

pub fn read_solution_csv(text: &str) -> Result<Vec<SolutionRow>, DesignError> {
    csv::Reader::from_reader(text.as_bytes())
        .deserialize()
        .collect::<Result<Vec<SolutionRow>, _>>()
        .map_err(|e| DesignError::Csv(e.to_string()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::clifford::Circuit;
    use crate::design::{build_design, solve, InventoryMode, RowKey, SolveOptions};
    use crate::noise::{GateInventory, NoiseModel};

    #[test]
    fn exports() {
        let c = Circuit::from_text("qubits 1\nH 0\nH 0\nmeasure\n").unwrap();
        let inv = GateInventory::from_circuits([&c]);
        let rows: Vec<RowKey> = ["X", "Y", "Z"].iter().map(|p| RowKey { circuit_id: 0, input: p.parse().unwrap() }).collect();
        let a = build_design(&[c], &rows, &inv, InventoryMode::Frozen).unwrap();
        assert!(write_triplets(&a).starts_with("# 3 6 8\n0 0 1\n0 1 1\n0 3 1\n"));
        assert_eq!(write_row_map(&a).lines().nth(1), Some("0,0,X"));
        assert_eq!(write_column_map(&a).lines().nth(4), Some("3,MEAS 0,X"));

        let opts = SolveOptions { check_rank: false, ..Default::default() };
        let mut s = solve(&a, &[1.0; 3], None, &opts).unwrap();
        let plain = write_solution_csv(&s);
        assert!(plain.starts_with("gate_id,pauli,lambda_hat,p_hat,tvd\nH 0,I,1.00000000000e0,1.00000000000e0,\n"));
        let back = read_solution_csv(&plain).unwrap();
        assert_eq!(back.len(), 8);
        assert_eq!(back[0].tvd, None);

        s.attach_truth(&NoiseModel::noiseless(&inv)).unwrap();
        let back = read_solution_csv(&write_solution_csv(&s)).unwrap();
        assert!(back.iter().all(|r| r.tvd == Some(0.0) && r.lambda_true == Some(1.0)));
        assert!(read_solution_csv("gate_id,pauli\nH 0,X\n").is_err());
    }
}
