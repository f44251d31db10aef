//! Shot-level sampling.
//!
//! Under randomized compiling each gate is followed on average by its Pauli
//! channel, so a shot is simulated by drawing one error Pauli per gate and
//! flipping the outcome of every tracked Pauli that anticommutes with it as it
//! passes. Shots are processed in blocks, 64 per word, and within a block
//! only shots where some gate errs are visited, by skipping ahead with
//! geometric gaps.

use std::collections::HashMap;

use rand::Rng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Geometric};
use rayon::prelude::*;

use super::batch::{batch_trajectories, check_disjoint};
use super::{Batch, SimulatorError};
use crate::clifford::{propagate, Circuit, Trajectory};
use crate::noise::NoiseModel;
use crate::pauli::{PauliIndex, PauliString};
use crate::seeding;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SimOptions {
    pub block_size: usize,
    /// Pack inputs into shared batches; otherwise every input runs alone.
    pub batching: bool,
}

impl Default for SimOptions {
    fn default() -> Self {
        SimOptions { block_size: 1 << 14, batching: true }
    }
}

/// Raw tallies behind an estimate. A flip is an outcome that disagrees with
/// the noiseless prediction.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct ShotCounts {
    pub plus_shots: u64,
    pub plus_flips: u64,
    pub minus_shots: u64,
    pub minus_flips: u64,
}

impl ShotCounts {
    fn add(&mut self, other: &ShotCounts) {
        self.plus_shots += other.plus_shots;
        self.plus_flips += other.plus_flips;
        self.minus_shots += other.minus_shots;
        self.minus_flips += other.minus_flips;
    }

    pub fn shots(&self) -> u64 {
        self.plus_shots + self.minus_shots
    }

    /// Mean of `sign * outcome` over each preparation group.
    fn group(shots: u64, flips: u64) -> Option<(f64, f64)> {
        (shots > 0).then(|| {
            let n = shots as f64;
            let mean = 1.0 - 2.0 * flips as f64 / n;
            let var = if shots > 1 { (1.0 - mean * mean).max(0.0) * n / (n - 1.0) } else { 0.0 };
            (mean, var / n)
        })
    }

    /// Differenced estimator `(mean_+ - mean_-) / 2`, each group's outcomes
    /// multiplied by the ideal sign. With one group empty the other is used
    /// alone.
    pub fn lambda_hat(&self) -> f64 {
        self.estimate().0
    }

    pub fn stderr(&self) -> f64 {
        self.estimate().1
    }

    fn estimate(&self) -> (f64, f64) {
        match (
            Self::group(self.plus_shots, self.plus_flips),
            Self::group(self.minus_shots, self.minus_flips),
        ) {
            (Some((mp, vp)), Some((mm, vm))) => (0.5 * (mp + mm), 0.5 * (vp + vm).sqrt()),
            (Some((m, v)), None) | (None, Some((m, v))) => (m, v.sqrt()),
            (None, None) => (f64::NAN, f64::NAN),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct EigenvalueEstimate {
    pub circuit_id: usize,
    pub input: PauliString,
    /// Ideal output, sign included.
    pub output: PauliString,
    pub shots: u64,
    pub lambda_hat: f64,
    pub stderr: f64,
    /// Present for simulated data, absent when read back from a file.
    pub counts: Option<ShotCounts>,
}

/// A noise event: with probability `rate` per shot, one of `outcomes` occurs,
/// chosen with the cumulative weights `cumulative`, flipping the listed rows.
struct Source {
    rate: f64,
    cumulative: Vec<f64>,
    flips: Vec<Vec<u32>>,
}

fn build_sources(rows: &[&Trajectory], noise: &NoiseModel) -> Result<Vec<Source>, SimulatorError> {
    // rows touching each gate instance, keyed by (layer, first qubit)
    let mut touched: HashMap<(usize, usize), Vec<(u32, PauliIndex)>> = HashMap::new();
    let mut gates = Vec::new();
    let mut sources = Vec::new();
    for (r, t) in rows.iter().enumerate() {
        for step in &t.steps {
            match step.layer {
                Some(layer) => {
                    let key = (layer, step.gate.qubits()[0]);
                    let entry = touched.entry(key).or_default();
                    if entry.is_empty() {
                        gates.push((key, step.gate.clone()));
                    }
                    entry.push((r as u32, step.label));
                }
                None => {
                    let q = noise.readout(step.gate.qubits()[0], step.label.slot(0))?;
                    if q > 0.0 {
                        sources.push(Source { rate: q, cumulative: vec![1.0], flips: vec![vec![r as u32]] });
                    }
                }
            }
        }
    }
    for (key, gate) in gates {
        let channel = noise.channel(&gate)?;
        let members = &touched[&key];
        let mut rate = 0.0;
        let mut cumulative = Vec::new();
        let mut flips = Vec::new();
        for (e, &p) in channel.rates().iter().enumerate().skip(1) {
            if p <= 0.0 {
                continue;
            }
            let error = PauliIndex(e as u16);
            let hit: Vec<u32> = members
                .iter()
                .filter(|(_, label)| label.symplectic(error))
                .map(|(r, _)| *r)
                .collect();
            if hit.is_empty() {
                continue;
            }
            rate += p;
            cumulative.push(rate);
            flips.push(hit);
        }
        if rate > 0.0 {
            cumulative.iter_mut().for_each(|c| *c /= rate);
            sources.push(Source { rate: rate.min(1.0), cumulative, flips });
        }
    }
    Ok(sources)
}

fn simulate_block(sources: &[Source], rows: usize, len: usize, rng: &mut ChaCha8Rng) -> Vec<ShotCounts> {
    let words = len.div_ceil(64);
    let mut parity = vec![0u64; rows * words];
    for src in sources {
        let gap = Geometric::new(src.rate).expect("rate in (0, 1]");
        let mut pos = gap.sample(rng);
        while pos < len as u64 {
            let which = if src.cumulative.len() == 1 {
                0
            } else {
                let u: f64 = rng.random();
                src.cumulative.partition_point(|&c| c <= u).min(src.cumulative.len() - 1)
            };
            let (w, bit) = ((pos / 64) as usize, pos % 64);
            for &r in &src.flips[which] {
                parity[r as usize * words + w] ^= 1 << bit;
            }
            pos = pos.saturating_add(1).saturating_add(gap.sample(rng));
        }
    }
    let tail = len % 64;
    (0..rows)
        .map(|r| {
            let mut c = ShotCounts::default();
            for w in 0..words {
                let valid = if w == words - 1 && tail != 0 { (1u64 << tail) - 1 } else { u64::MAX };
                let plus: u64 = rng.random::<u64>() & valid;
                let minus = !plus & valid;
                let flipped = parity[r * words + w];
                c.plus_shots += plus.count_ones() as u64;
                c.plus_flips += (flipped & plus).count_ones() as u64;
                c.minus_shots += minus.count_ones() as u64;
                c.minus_flips += (flipped & minus).count_ones() as u64;
            }
            c
        })
        .collect()
}

/// Run `shots` shots of one batch. Block `j` draws from the substream
/// `("shots", [circuit, batch, shots, j])`, so the result does not depend on
/// how blocks are scheduled.
pub fn simulate_batch(
    rows: &[&Trajectory],
    noise: &NoiseModel,
    shots: u64,
    seed: u64,
    stream: [u64; 2],
    options: SimOptions,
) -> Result<Vec<ShotCounts>, SimulatorError> {
    if shots == 0 {
        return Err(SimulatorError::ZeroShots);
    }
    check_disjoint(rows)?;
    let sources = build_sources(rows, noise)?;
    let block = options.block_size.max(64) as u64;
    let blocks = shots.div_ceil(block);
    let partial: Vec<Vec<ShotCounts>> = (0..blocks)
        .into_par_iter()
        .map(|j| {
            let len = block.min(shots - j * block) as usize;
            let mut rng = seeding::substream(seed, "shots", &[stream[0], stream[1], shots, j]);
            simulate_block(&sources, rows.len(), len, &mut rng)
        })
        .collect();
    let mut total = vec![ShotCounts::default(); rows.len()];
    for block_counts in &partial {
        for (t, c) in total.iter_mut().zip(block_counts) {
            t.add(c);
        }
    }
    Ok(total)
}

/// Estimate the circuit eigenvalue of every input of one circuit with
/// `shots` shots per batch. Returns estimates in input order and the batches
/// used.
pub fn simulate_experiment(
    circuit: &Circuit,
    circuit_id: usize,
    noise: &NoiseModel,
    inputs: &[PauliString],
    shots: u64,
    seed: u64,
    options: SimOptions,
) -> Result<(Vec<EigenvalueEstimate>, Vec<Batch>), SimulatorError> {
    if shots == 0 {
        return Err(SimulatorError::ZeroShots);
    }
    let trajectories = inputs
        .iter()
        .map(|p| propagate(circuit, p))
        .collect::<Result<Vec<_>, _>>()?;
    let batches = if options.batching {
        batch_trajectories(&trajectories)
    } else {
        (0..trajectories.len())
            .map(|i| Batch { members: vec![i], basis: trajectories[i].output.unsigned() })
            .collect()
    };
    let counts = batches
        .par_iter()
        .enumerate()
        .map(|(b, batch)| {
            let rows: Vec<&Trajectory> = batch.members.iter().map(|&i| &trajectories[i]).collect();
            simulate_batch(&rows, noise, shots, seed, [circuit_id as u64, b as u64], options)
        })
        .collect::<Result<Vec<_>, _>>()?;
    let mut per_input = vec![ShotCounts::default(); inputs.len()];
    for (batch, c) in batches.iter().zip(counts) {
        for (&i, c) in batch.members.iter().zip(c) {
            per_input[i] = c;
        }
    }
    let estimates = trajectories
        .into_iter()
        .zip(per_input)
        .map(|(t, c)| EigenvalueEstimate {
            circuit_id,
            input: t.input,
            output: t.output,
            shots: c.shots(),
            lambda_hat: c.lambda_hat(),
            stderr: c.stderr(),
            counts: Some(c),
        })
        .collect();
    Ok((estimates, batches))
}
