use std::collections::HashMap;

use serde::{Deserialize, Serialize};

use super::diagnostics::{analyze, gram_rank};
use super::{lsqr, DesignError, DesignMatrix, RowKey, Variable};
use crate::clifford::GateIdentity;
use crate::noise::{rates_from_eigenvalues, tvd, NoiseModel, PauliChannel};
use crate::pauli::PauliIndex;
use crate::simulator::EigenvalueEstimate;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct SolveOptions {
    /// Rows with `Λ̂ ≤ floor` are left out of the fit.
    pub floor: f64,
    /// Weight rows by the inverse standard error of `-ln Λ̂`.
    pub weighted: bool,
    pub atol: f64,
    pub max_iterations: usize,
    /// Reconstructed rates below `-rate_tolerance` count as clipped.
    pub rate_tolerance: f64,
    /// Refuse to solve unless the kept rows give rank `N`.
    pub check_rank: bool,
}

impl Default for SolveOptions {
    fn default() -> Self {
        SolveOptions {
            floor: 0.1,
            weighted: false,
            atol: 1e-14,
            max_iterations: 20_000,
            rate_tolerance: 1e-12,
            check_rank: true,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct GateTruth {
    pub eigenvalues: Vec<f64>,
    pub rates: Vec<f64>,
    pub tvd: f64,
    pub max_eigenvalue_error: f64,
}

/// Estimated eigenvalues and rates of one gate or measurement, identity
/// label included.
#[derive(Debug, Clone, PartialEq)]
pub struct GateEstimate {
    pub gate: GateIdentity,
    pub eigenvalues: Vec<f64>,
    pub rates: Vec<f64>,
    /// Some reconstructed rate was negative and the vector was clipped.
    pub clipped: bool,
    pub truth: Option<GateTruth>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Solution {
    pub columns: Vec<Variable>,
    pub x_untruncated: Vec<f64>,
    pub x: Vec<f64>,
    pub lambda: Vec<f64>,
    pub gates: Vec<GateEstimate>,
    /// `‖A x - b‖` over the kept rows, after truncation.
    pub residual_norm: f64,
    pub residual_norm_untruncated: f64,
    pub dropped_rows: Vec<usize>,
    /// Variables with negative `x̂` set to zero.
    pub truncated: usize,
    pub iterations: usize,
    pub converged: bool,
}

impl Solution {
    pub fn clipped_gates(&self) -> usize {
        self.gates.iter().filter(|g| g.clipped).count()
    }

    /// Fill in the truth fields from the noise model that generated the data.
    pub fn attach_truth(&mut self, noise: &NoiseModel) -> Result<(), DesignError> {
        for g in &mut self.gates {
            let eigenvalues = noise.eigenvalues_of(&g.gate)?;
            let rates = noise.rates_of(&g.gate)?;
            let max_eigenvalue_error = g
                .eigenvalues
                .iter()
                .zip(&eigenvalues)
                .map(|(a, b)| (a - b).abs())
                .fold(0.0, f64::max);
            g.truth = Some(GateTruth { tvd: tvd(&g.rates, &rates)?, eigenvalues, rates, max_eigenvalue_error });
        }
        Ok(())
    }

    pub fn tvds(&self) -> Vec<f64> {
        self.gates.iter().filter_map(|g| g.truth.as_ref().map(|t| t.tvd)).collect()
    }
}

/// Estimates in design row order: `(Λ̂, stderr)`.
pub fn align_estimates(design: &DesignMatrix, estimates: &[EigenvalueEstimate]) -> Result<(Vec<f64>, Vec<f64>), DesignError> {
    let mut by_key: HashMap<RowKey, &EigenvalueEstimate> = HashMap::with_capacity(estimates.len());
    for e in estimates {
        let key = RowKey { circuit_id: e.circuit_id, input: e.input.clone() };
        if by_key.insert(key.clone(), e).is_some() {
            return Err(DesignError::DuplicateEstimate(key.to_string()));
        }
    }
    design
        .rows()
        .iter()
        .map(|k| {
            by_key
                .get(k)
                .map(|e| (e.lambda_hat, e.stderr))
                .ok_or_else(|| DesignError::MissingEstimate(k.to_string()))
        })
        .collect::<Result<Vec<_>, _>>()
        .map(|v| v.into_iter().unzip())
}

fn residual(a: &DesignMatrix, x: &[f64], b: &[f64]) -> f64 {
    a.apply(x).iter().zip(b).map(|(ax, bi)| (ax - bi).powi(2)).sum::<f64>().sqrt()
}

/// Truncated least-squares estimate of every variable from the circuit
/// eigenvalue estimates `lambda_hat` (in row order).
pub fn solve(
    design: &DesignMatrix,
    lambda_hat: &[f64],
    stderr: Option<&[f64]>,
    options: &SolveOptions,
) -> Result<Solution, DesignError> {
    assert_eq!(lambda_hat.len(), design.row_count(), "one estimate per row");
    let (kept, dropped_rows): (Vec<usize>, Vec<usize>) =
        (0..design.row_count()).partition(|&mu| lambda_hat[mu] > options.floor);
    let reduced = design.select_rows(&kept);
    if let Some(&c) = reduced.empty_columns().first() {
        return Err(DesignError::AllRowsDropped(design.columns()[c].to_string()));
    }
    if options.check_rank && gram_rank(&reduced) < reduced.column_count() {
        analyze(&reduced, 0).require_full_rank()?;
    }
    let b: Vec<f64> = kept.iter().map(|&mu| -lambda_hat[mu].ln()).collect();
    let weights: Option<Vec<f64>> = match (options.weighted, stderr) {
        (true, Some(se)) => {
            let sigma: Vec<f64> = kept.iter().map(|&mu| se[mu] / lambda_hat[mu]).collect();
            let floor = sigma.iter().copied().filter(|s| *s > 0.0).fold(f64::INFINITY, f64::min);
            let floor = if floor.is_finite() { floor } else { 1.0 };
            Some(sigma.iter().map(|s| 1.0 / s.max(floor)).collect())
        }
        _ => None,
    };
    let n = reduced.column_count();
    let result = match &weights {
        None => lsqr(|x| reduced.apply(x), |y| reduced.apply_transpose(y), &b, n, options.atol, options.atol, options.max_iterations),
        Some(w) => {
            let wb: Vec<f64> = b.iter().zip(w).map(|(bi, wi)| bi * wi).collect();
            lsqr(
                |x| reduced.apply(x).iter().zip(w).map(|(v, wi)| v * wi).collect(),
                |y| {
                    let wy: Vec<f64> = y.iter().zip(w).map(|(v, wi)| v * wi).collect();
                    reduced.apply_transpose(&wy)
                },
                &wb,
                n,
                options.atol,
                options.atol,
                options.max_iterations,
            )
        }
    };
    let x_untruncated = result.x;
    let x: Vec<f64> = x_untruncated.iter().map(|&v| v.max(0.0)).collect();
    let truncated = x_untruncated.iter().filter(|&&v| v < 0.0).count();
    let lambda: Vec<f64> = x.iter().map(|v| (-v).exp()).collect();
    let gates = gate_estimates(design.columns(), &lambda, options.rate_tolerance)?;
    Ok(Solution {
        columns: design.columns().to_vec(),
        residual_norm: residual(&reduced, &x, &b),
        residual_norm_untruncated: residual(&reduced, &x_untruncated, &b),
        x_untruncated,
        x,
        lambda,
        gates,
        dropped_rows,
        truncated,
        iterations: result.iterations,
        converged: result.converged,
    })
}

fn gate_estimates(columns: &[Variable], lambda: &[f64], tolerance: f64) -> Result<Vec<GateEstimate>, DesignError> {
    let mut order: Vec<GateIdentity> = Vec::new();
    let mut eigen: HashMap<GateIdentity, Vec<f64>> = HashMap::new();
    for (v, &l) in columns.iter().zip(lambda) {
        let entry = eigen.entry(v.gate.clone()).or_insert_with(|| {
            order.push(v.gate.clone());
            vec![1.0; PauliIndex::count(v.gate.arity())]
        });
        entry[v.label.value()] = l;
    }
    order
        .into_iter()
        .map(|gate| {
            let eigenvalues = eigen.remove(&gate).expect("inserted");
            let recon = rates_from_eigenvalues(&eigenvalues, tolerance)?;
            let (rates, clipped) = if gate.kind().is_measurement() {
                (recon.rates, false)
            } else if recon.flagged {
                (recon.clipped().rates().to_vec(), true)
            } else {
                (PauliChannel::clipped(recon.rates)?.rates().to_vec(), false)
            };
            Ok(GateEstimate { gate, eigenvalues, rates, clipped, truth: None })
        })
        .collect()
}
