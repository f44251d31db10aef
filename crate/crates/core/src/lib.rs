//! Averaged circuit eigenvalue sampling.
//!
//! Simulates eigenvalue-sampling experiments on Pauli-twirled Clifford
//! circuits under a Pauli noise model and estimates the Pauli error rates of
//! every gate and measurement from the sampled circuit eigenvalues.

pub mod clifford;
pub mod design;
pub mod experiment;
pub mod generator;
pub mod noise;
pub mod pauli;
pub mod seeding;
pub mod simulator;
