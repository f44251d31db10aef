//! Dense-matrix reference implementations shared by the integration tests.
//!
//! Qubit `q` is bit `q` of the computational basis index. Gate matrices are
//! written out here from their textbook definitions rather than taken from
//! the library.

#![allow(dead_code)]

use aces::clifford::{Circuit, GateIdentity, GateKind, SingleKind};
use aces::noise::{random_noise_model, GateInventory, NoiseModel, NoiseRanges, Range};
use aces::pauli::{Pauli, PauliIndex, PauliString};
use nalgebra::DMatrix;
use num_complex::Complex64;
use rand::seq::{IndexedRandom, SliceRandom};
use rand::Rng;

pub type C = Complex64;
pub type Mat = DMatrix<C>;

pub fn c(re: f64, im: f64) -> C {
    C::new(re, im)
}

pub fn pauli_matrix(p: &PauliString) -> Mat {
    let n = p.num_qubits();
    let dim = 1 << n;
    let sign = if p.is_negative() { -1.0 } else { 1.0 };
    let mut m = Mat::zeros(dim, dim);
    for col in 0..dim {
        let mut row = col;
        let mut amp = c(sign, 0.0);
        for q in 0..n {
            let bit = (col >> q) & 1;
            match p.get(q) {
                Pauli::I => {}
                Pauli::X => row ^= 1 << q,
                Pauli::Z => {
                    if bit == 1 {
                        amp = -amp;
                    }
                }
                Pauli::Y => {
                    // Y|0> = i|1>, Y|1> = -i|0>
                    row ^= 1 << q;
                    amp *= if bit == 0 { c(0.0, 1.0) } else { c(0.0, -1.0) };
                }
            }
        }
        m[(row, col)] = amp;
    }
    m
}

fn m2(a: C, b: C, cc: C, d: C) -> Mat {
    Mat::from_row_slice(2, 2, &[a, b, cc, d])
}

pub fn hadamard() -> Mat {
    let r = std::f64::consts::FRAC_1_SQRT_2;
    m2(c(r, 0.), c(r, 0.), c(r, 0.), c(-r, 0.))
}

pub fn phase() -> Mat {
    m2(c(1., 0.), c(0., 0.), c(0., 0.), c(0., 1.))
}

/// Single-qubit gate matrix, up to a global phase.
pub fn single_matrix(k: SingleKind) -> Mat {
    let h = hadamard();
    let s = phase();
    match k {
        SingleKind::I => Mat::identity(2, 2),
        SingleKind::H => h,
        SingleKind::S => s,
        SingleKind::Sdg => s.adjoint(),
        // square root of X
        SingleKind::Sx => &h * &s * &h,
        SingleKind::Sxdg => (&h * &s * &h).adjoint(),
        // X -> Y -> Z -> X
        SingleKind::Cxyz => &h * s.adjoint(),
        SingleKind::Czyx => (&h * s.adjoint()).adjoint(),
    }
}

/// Two-qubit matrix of a gate kind on slots (0, 1), slot 0 the low bit.
pub fn kind_matrix(kind: GateKind) -> Mat {
    match kind {
        GateKind::Single(k) => single_matrix(k),
        GateKind::Cx => {
            let mut m = Mat::zeros(4, 4);
            for col in 0..4 {
                let row = if col & 1 == 1 { col ^ 2 } else { col };
                m[(row, col)] = c(1., 0.);
            }
            m
        }
        GateKind::Cz => {
            let mut m = Mat::identity(4, 4);
            m[(3, 3)] = c(-1., 0.);
            m
        }
        GateKind::Pair(a, b) => single_matrix(b).kronecker(&single_matrix(a)),
        GateKind::Meas => panic!("measurement has no matrix"),
    }
}

/// `g` acting on `qubits` of an `n`-qubit register.
pub fn embed(g: &Mat, qubits: &[usize], n: usize) -> Mat {
    let dim = 1 << n;
    let k = qubits.len();
    let mut m = Mat::zeros(dim, dim);
    for col in 0..dim {
        let local_col = qubits.iter().enumerate().fold(0, |acc, (j, &q)| acc | (((col >> q) & 1) << j));
        let rest = qubits.iter().fold(col, |acc, &q| acc & !(1 << q));
        for local_row in 0..(1 << k) {
            let amp = g[(local_row, local_col)];
            if amp == c(0., 0.) {
                continue;
            }
            let row = qubits.iter().enumerate().fold(rest, |acc, (j, &q)| acc | (((local_row >> j) & 1) << q));
            m[(row, col)] += amp;
        }
    }
    m
}

pub fn gate_matrix(g: &GateIdentity, n: usize) -> Mat {
    embed(&kind_matrix(g.kind()), g.qubits(), n)
}

pub fn layer_matrix(layer: &[GateIdentity], n: usize) -> Mat {
    layer.iter().fold(Mat::identity(1 << n, 1 << n), |acc, g| gate_matrix(g, n) * acc)
}

pub fn circuit_matrix(circuit: &Circuit) -> Mat {
    let n = circuit.num_qubits();
    circuit
        .layers()
        .iter()
        .fold(Mat::identity(1 << n, 1 << n), |acc, layer| layer_matrix(layer, n) * acc)
}

/// Every `n`-qubit Pauli, unsigned.
pub fn all_paulis(n: usize) -> Vec<PauliString> {
    let qubits: Vec<usize> = (0..n).collect();
    (0..1u16 << (2 * n)).map(|a| PauliString::from_index(n, &qubits, PauliIndex(a))).collect()
}

/// The signed Pauli equal to `m`, if there is one.
pub fn as_signed_pauli(m: &Mat, n: usize) -> Option<PauliString> {
    let dim = (1 << n) as f64;
    for p in all_paulis(n) {
        let overlap = (pauli_matrix(&p).adjoint() * m).trace() / dim;
        for (s, negative) in [(1.0, false), (-1.0, true)] {
            if (overlap - c(s, 0.)).norm() < 1e-9 {
                let q = p.clone().with_sign(negative);
                if (pauli_matrix(&q) - m).norm() < 1e-9 {
                    return Some(q);
                }
            }
        }
    }
    None
}

/// `U P U†` for the circuit unitary, as a signed Pauli.
pub fn dense_conjugate(u: &Mat, p: &PauliString) -> PauliString {
    let n = p.num_qubits();
    let image = u * pauli_matrix(p) * u.adjoint();
    as_signed_pauli(&image, n).expect("Clifford image of a Pauli is a signed Pauli")
}

/// `ρ ↦ Σ_a p_a P_a ρ P_a` with `P_a` on `qubits`.
pub fn apply_pauli_channel(rho: &Mat, rates: &[f64], qubits: &[usize], n: usize) -> Mat {
    let mut out = Mat::zeros(rho.nrows(), rho.ncols());
    for (a, &p) in rates.iter().enumerate() {
        if p == 0.0 {
            continue;
        }
        let pa = pauli_matrix(&PauliString::from_index(n, qubits, PauliIndex(a as u16)));
        out += (&pa * rho * &pa) * c(p, 0.);
    }
    out
}

/// Circuit eigenvalue from dense evolution of `P_in`: gate noise before each
/// gate, the layer unitary, and readout flips on the measured support, then
/// `Tr(P_out C(P_in)) / 2^n` with the signed ideal output `P_out`.
pub fn dense_circuit_eigenvalue(circuit: &Circuit, noise: &NoiseModel, input: &PauliString) -> f64 {
    let n = circuit.num_qubits();
    let mut rho = pauli_matrix(input);
    let mut u_total = Mat::identity(1 << n, 1 << n);
    for layer in circuit.layers() {
        for g in layer {
            let rates = noise.channel(g).expect("modeled gate").rates().to_vec();
            rho = apply_pauli_channel(&rho, &rates, g.qubits(), n);
        }
        let u = layer_matrix(layer, n);
        rho = &u * rho * u.adjoint();
        u_total = u * u_total;
    }
    let output = dense_conjugate(&u_total, input);
    for q in 0..n {
        let basis = output.get(q);
        if basis == Pauli::I {
            continue;
        }
        let flip = noise.readout(q, basis).expect("modeled readout");
        // a flip of a `basis` measurement is an anticommuting Pauli before it
        let f = pauli_matrix(&PauliString::single(n, q, if basis == Pauli::Z { Pauli::X } else { Pauli::Z }));
        rho = &rho * c(1.0 - flip, 0.) + (&f * &rho * &f) * c(flip, 0.);
    }
    ((pauli_matrix(&output) * rho).trace() / (1 << n) as f64).re
}

/// `λ_b = Tr(P_b E(P_b)) / 2^k` of a Pauli channel on `k` qubits.
pub fn dense_channel_eigenvalues(rates: &[f64], k: usize) -> Vec<f64> {
    let qubits: Vec<usize> = (0..k).collect();
    (0..rates.len())
        .map(|b| {
            let pb = pauli_matrix(&PauliString::from_index(k, &qubits, PauliIndex(b as u16)));
            let image = apply_pauli_channel(&pb, rates, &qubits, k);
            ((pb * image).trace() / (1 << k) as f64).re
        })
        .collect()
}

pub fn all_kinds() -> Vec<GateKind> {
    let mut kinds: Vec<GateKind> = SingleKind::ALL.into_iter().map(GateKind::Single).collect();
    kinds.extend([GateKind::Cx, GateKind::Cz]);
    for a in SingleKind::ALL {
        for b in SingleKind::ALL {
            kinds.push(GateKind::Pair(a, b));
        }
    }
    kinds
}

/// Random layered circuit over every gate kind; each layer covers all qubits.
pub fn random_circuit(n: usize, depth: usize, rng: &mut impl Rng) -> Circuit {
    let two = [GateKind::Cx, GateKind::Cz];
    let layers = (0..depth)
        .map(|_| {
            let mut qubits: Vec<usize> = (0..n).collect();
            qubits.shuffle(rng);
            let mut layer = Vec::new();
            let mut rest = qubits.as_slice();
            while !rest.is_empty() {
                if rest.len() >= 2 && rng.random_bool(0.5) {
                    let kind = match rng.random_range(0..3) {
                        0 | 1 => two[rng.random_range(0..2)],
                        _ => GateKind::Pair(
                            *SingleKind::ALL.choose(rng).unwrap(),
                            *SingleKind::ALL.choose(rng).unwrap(),
                        ),
                    };
                    layer.push(GateIdentity::new(kind, &rest[..2]).unwrap());
                    rest = &rest[2..];
                } else {
                    let k = *SingleKind::ALL.choose(rng).unwrap();
                    layer.push(GateIdentity::new(GateKind::Single(k), &rest[..1]).unwrap());
                    rest = &rest[1..];
                }
            }
            layer
        })
        .collect();
    Circuit::new(n, layers).unwrap()
}

pub fn random_pauli(n: usize, rng: &mut impl Rng) -> PauliString {
    loop {
        let p = PauliString::from_paulis(&(0..n).map(|_| Pauli::from_code(rng.random_range(0..4))).collect::<Vec<_>>());
        if !p.is_identity() {
            return p;
        }
    }
}

/// Strong noise so that errors in the composition rules show up.
pub fn strong_noise(circuits: &[&Circuit], seed: u64) -> NoiseModel {
    let ranges = NoiseRanges { single: Range(0.02, 0.1), two: Range(0.05, 0.2), readout: Range(0.01, 0.1) };
    random_noise_model(&GateInventory::from_circuits(circuits.iter().copied()), &ranges, seed).unwrap()
}

/// Random rate vector on `k` qubits, normalized.
pub fn random_rates(k: usize, rng: &mut impl Rng) -> Vec<f64> {
    let mut r: Vec<f64> = (0..1 << (2 * k)).map(|_| rng.random::<f64>()).collect();
    r[0] += 4.0 * r.len() as f64 * rng.random::<f64>();
    let s: f64 = r.iter().sum();
    r.iter_mut().for_each(|x| *x /= s);
    r
}
