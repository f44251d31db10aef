//! Pauli channels and the rate/eigenvalue transform pair.
//!
//! With labels packed per qubit as `x + 2z`, the eigenvalues are
//! `λ_b = Σ_a (-1)^{<a,b>} p_a` and the inverse is the same kernel scaled by
//! `4^-k`. The symplectic form factorizes over qubits, so both directions are
//! a tensor product of one 4-point kernel applied slot by slot.

use super::NoiseError;
use crate::pauli::PauliIndex;

/// Tolerance on the normalization of a channel's rates.
pub const NORMALIZATION_TOL: f64 = 1e-12;

#[inline]
fn kernel(v: [f64; 4]) -> [f64; 4] {
    // rows b = I, X, Z, Y; columns a = I, X, Z, Y
    [
        v[0] + v[1] + v[2] + v[3],
        v[0] + v[1] - v[2] - v[3],
        v[0] - v[1] + v[2] - v[3],
        v[0] - v[1] - v[2] + v[3],
    ]
}

fn transform_in_place(values: &mut [f64]) {
    let len = values.len();
    let mut stride = 1;
    while stride < len {
        let block = 4 * stride;
        for base in (0..len).step_by(block) {
            for off in 0..stride {
                let i = base + off;
                let out = kernel([
                    values[i],
                    values[i + stride],
                    values[i + 2 * stride],
                    values[i + 3 * stride],
                ]);
                for (j, v) in out.into_iter().enumerate() {
                    values[i + j * stride] = v;
                }
            }
        }
        stride = block;
    }
}

fn support_size(len: usize) -> Result<usize, NoiseError> {
    let k = (len.trailing_zeros() / 2) as usize;
    if len == 0 || PauliIndex::count(k) != len {
        return Err(NoiseError::Length(len));
    }
    Ok(k)
}

/// Pauli eigenvalues of the channel with error rates `rates`.
pub fn eigenvalues_from_rates(rates: &[f64]) -> Result<Vec<f64>, NoiseError> {
    support_size(rates.len())?;
    let mut out = rates.to_vec();
    transform_in_place(&mut out);
    Ok(out)
}

/// Output of the inverse transform, before any physicality repair.
#[derive(Debug, Clone, PartialEq)]
pub struct RateReconstruction {
    pub rates: Vec<f64>,
    /// Set when some rate is below `-tolerance`.
    pub flagged: bool,
}

impl RateReconstruction {
    pub fn min_rate(&self) -> f64 {
        self.rates.iter().copied().fold(f64::INFINITY, f64::min)
    }

    /// Clip negative rates to zero and renormalize.
    pub fn clipped(&self) -> PauliChannel {
        PauliChannel::clipped(self.rates.clone()).expect("a reconstruction has a valid length")
    }
}

/// Inverse transform `p_a = 4^-k Σ_b (-1)^{<a,b>} λ_b`.
pub fn rates_from_eigenvalues(eigenvalues: &[f64], tolerance: f64) -> Result<RateReconstruction, NoiseError> {
    let k = support_size(eigenvalues.len())?;
    if (eigenvalues[0] - 1.0).abs() > NORMALIZATION_TOL {
        return Err(NoiseError::IdentityEigenvalue(eigenvalues[0]));
    }
    let mut rates = eigenvalues.to_vec();
    transform_in_place(&mut rates);
    let scale = 1.0 / PauliIndex::count(k) as f64;
    rates.iter_mut().for_each(|r| *r *= scale);
    let flagged = rates.iter().any(|&r| r < -tolerance);
    Ok(RateReconstruction { rates, flagged })
}

/// Total variation distance between two rate vectors.
pub fn tvd(p: &[f64], q: &[f64]) -> Result<f64, NoiseError> {
    if p.len() != q.len() {
        return Err(NoiseError::Length(q.len()));
    }
    Ok(0.5 * p.iter().zip(q).map(|(a, b)| (a - b).abs()).sum::<f64>())
}

/// Normalized Pauli channel on a `k`-qubit support.
#[derive(Debug, Clone, PartialEq)]
pub struct PauliChannel {
    k: usize,
    rates: Vec<f64>,
    eigenvalues: Vec<f64>,
}

impl PauliChannel {
    pub fn new(rates: Vec<f64>) -> Result<PauliChannel, NoiseError> {
        let k = support_size(rates.len())?;
        if let Some((i, &r)) = rates.iter().enumerate().find(|(_, r)| !(**r >= 0.0) || **r > 1.0) {
            return Err(NoiseError::InvalidRate { index: i, value: r });
        }
        let total: f64 = rates.iter().sum();
        if (total - 1.0).abs() > NORMALIZATION_TOL {
            return Err(NoiseError::NotNormalized(total));
        }
        let eigenvalues = eigenvalues_from_rates(&rates)?;
        Ok(PauliChannel { k, rates, eigenvalues })
    }

    pub fn identity(k: usize) -> PauliChannel {
        let mut rates = vec![0.0; PauliIndex::count(k)];
        rates[0] = 1.0;
        PauliChannel::new(rates).expect("point mass is valid")
    }

    /// Clip negatives to zero and renormalize. An all-zero vector becomes the identity channel.
    pub fn clipped(mut rates: Vec<f64>) -> Result<PauliChannel, NoiseError> {
        let k = support_size(rates.len())?;
        rates.iter_mut().for_each(|r| *r = r.max(0.0));
        let total: f64 = rates.iter().sum();
        if !(total > 0.0) || !total.is_finite() {
            return Ok(PauliChannel::identity(k));
        }
        rates.iter_mut().for_each(|r| *r /= total);
        let rest: f64 = rates[1..].iter().sum();
        rates[0] = 1.0 - rest;
        PauliChannel::new(rates)
    }

    #[inline]
    pub fn support_size(&self) -> usize {
        self.k
    }

    pub fn rates(&self) -> &[f64] {
        &self.rates
    }

    pub fn eigenvalues(&self) -> &[f64] {
        &self.eigenvalues
    }

    #[inline]
    pub fn eigenvalue(&self, label: PauliIndex) -> f64 {
        self.eigenvalues[label.value()]
    }

    /// Total probability of a non-identity error.
    pub fn error_rate(&self) -> f64 {
        1.0 - self.rates[0]
    }
}
