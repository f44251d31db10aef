//! Estimates CSV: `circuit_id,input_pauli,output_pauli,shots,lambda_hat,stderr`
//! plus an optional `lambda_true` column for simulated data.

use serde::Deserialize;

use super::{EigenvalueEstimate, SimulatorError};
use crate::pauli::PauliString;

/// Estimates read from a file, with the truth column when present.
#[derive(Debug, Clone, PartialEq)]
pub struct EstimateTable {
    pub estimates: Vec<EigenvalueEstimate>,
    pub truth: Option<Vec<f64>>,
}

/// Twelve significant digits.
pub(crate) fn fmt_real(x: f64) -> String {
    format!("{x:.11e}")
}

pub fn write_estimates_csv(estimates: &[EigenvalueEstimate], truth: Option<&[f64]>) -> String {
    let mut w = csv::Writer::from_writer(Vec::new());
    let mut header = vec!["circuit_id", "input_pauli", "output_pauli", "shots", "lambda_hat", "stderr"];
    if truth.is_some() {
        header.push("lambda_true");
    }
    w.write_record(&header).expect("in-memory write");
    for (i, e) in estimates.iter().enumerate() {
        let mut rec = vec![
            e.circuit_id.to_string(),
            e.input.to_string(),
            e.output.to_string(),
            e.shots.to_string(),
            fmt_real(e.lambda_hat),
            fmt_real(e.stderr),
        ];
        if let Some(t) = truth {
            rec.push(fmt_real(t[i]));
        }
        w.write_record(&rec).expect("in-memory write");
    }
    String::from_utf8(w.into_inner().expect("in-memory flush")).expect("ascii")
}

#[derive(Deserialize)]
struct Row {
    circuit_id: usize,
    input_pauli: String,
    output_pauli: String,
    shots: u64,
    lambda_hat: f64,
    stderr: f64,
    #[serde(default)]
    lambda_true: Option<f64>,
}

pub fn read_estimates_csv(text: &str) -> Result<EstimateTable, SimulatorError> {
    let mut reader = csv::ReaderBuilder::new().trim(csv::Trim::All).from_reader(text.as_bytes());
    let has_truth = reader
        .headers()
        .map_err(|e| SimulatorError::Csv(e.to_string()))?
        .iter()
        .any(|h| h == "lambda_true");
    let mut estimates = Vec::new();
    let mut truth = Vec::new();
    for (i, row) in reader.deserialize::<Row>().enumerate() {
        let row = row.map_err(|e| SimulatorError::Csv(e.to_string()))?;
        let pauli = |s: &str| {
            s.parse::<PauliString>()
                .map_err(|e| SimulatorError::Csv(format!("row {}: {e}", i + 1)))
        };
        let input = pauli(&row.input_pauli)?;
        let output = pauli(&row.output_pauli)?;
        if input.num_qubits() != output.num_qubits() {
            return Err(SimulatorError::Csv(format!("row {}: input and output widths differ", i + 1)));
        }
        if has_truth {
            truth.push(row.lambda_true.ok_or_else(|| SimulatorError::Csv(format!("row {}: missing lambda_true", i + 1)))?);
        }
        estimates.push(EigenvalueEstimate {
            circuit_id: row.circuit_id,
            input,
            output,
            shots: row.shots,
            lambda_hat: row.lambda_hat,
            stderr: row.stderr,
            counts: None,
        });
    }
    Ok(EstimateTable { estimates, truth: has_truth.then_some(truth) })
}
