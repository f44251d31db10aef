//! Library results against dense-matrix references.

mod common;

use aces::clifford::{conjugate_gate, propagate, Circuit, GateIdentity, GateKind};
use aces::generator::sample_randomized_compiling;
use aces::noise::{eigenvalues_from_rates, rates_from_eigenvalues, PauliChannel};
use aces::pauli::{PauliIndex, PauliString};
use aces::seeding::substream;
use aces::simulator::exact_circuit_eigenvalue;
use common::*;
use proptest::prelude::*;

#[test]
fn commutation_matches_matrices() {
    for n in [1, 2] {
        let ps = all_paulis(n);
        for a in &ps {
            for b in &ps {
                let (ma, mb) = (pauli_matrix(a), pauli_matrix(b));
                let commutes = (&ma * &mb - &mb * &ma).norm() < 1e-12;
                assert_eq!(a.commutes_with(b).unwrap(), commutes, "{a} {b}");
            }
        }
    }
}

#[test]
fn product_phase_matches_matrices() {
    let i = c(0., 1.);
    for a in all_paulis(2) {
        for b in all_paulis(2) {
            let k = a.product_phase(&b).unwrap();
            let prod = a.multiply(&b).unwrap().unsigned();
            let phase = i.powu(k as u32);
            let lhs = pauli_matrix(&a) * pauli_matrix(&b);
            assert!((lhs - pauli_matrix(&prod) * phase).norm() < 1e-12, "{a} {b}");
        }
    }
}

#[test]
fn single_gate_conjugation_matches_matrices() {
    // every kind, both orientations, every label on a two-qubit register
    for kind in all_kinds() {
        let placements: &[&[usize]] = if kind.arity() == 1 { &[&[0], &[1]] } else { &[&[0, 1], &[1, 0]] };
        for &qubits in placements {
            let g = GateIdentity::new(kind, qubits).unwrap();
            let u = gate_matrix(&g, 2);
            for p in all_paulis(2) {
                for negative in [false, true] {
                    let p = p.clone().with_sign(negative);
                    assert_eq!(conjugate_gate(&g, &p).unwrap(), dense_conjugate(&u, &p), "{g} {p}");
                }
            }
        }
    }
}

#[test]
fn inverse_gate_undoes_gate() {
    for kind in all_kinds() {
        let qubits: &[usize] = if kind.arity() == 1 { &[0] } else { &[0, 1] };
        let g = GateIdentity::new(kind, qubits).unwrap();
        let prod = gate_matrix(&g.inverse(), 2) * gate_matrix(&g, 2);
        // identity up to a global phase
        let phase = prod[(0, 0)];
        assert!((phase.norm() - 1.0).abs() < 1e-12);
        assert!((prod - Mat::identity(4, 4) * phase).norm() < 1e-12, "{g}");
    }
}

#[test]
fn propagation_matches_circuit_unitary() {
    let mut rng = substream(11, "oracle-propagation", &[]);
    for _ in 0..60 {
        let c = random_circuit(3, 5, &mut rng);
        let u = circuit_matrix(&c);
        for _ in 0..4 {
            let p = random_pauli(3, &mut rng);
            assert_eq!(propagate(&c, &p).unwrap().output, dense_conjugate(&u, &p), "{}", c.to_text());
        }
    }
}

#[test]
fn product_law_matches_dense_evolution() {
    let mut rng = substream(12, "oracle-product", &[]);
    for i in 0..40 {
        let c = random_circuit(3, 4, &mut rng);
        let noise = strong_noise(&[&c], 100 + i);
        let p = random_pauli(3, &mut rng);
        let exact = exact_circuit_eigenvalue(&c, &noise, &p).unwrap();
        let dense = dense_circuit_eigenvalue(&c, &noise, &p);
        assert!((exact - dense).abs() < 1e-10, "{exact} vs {dense}\n{}", c.to_text());
    }
}

#[test]
fn transform_matches_dense_traces() {
    let mut rng = substream(13, "oracle-transform", &[]);
    for k in [1, 2] {
        for _ in 0..20 {
            let rates = random_rates(k, &mut rng);
            let fast = eigenvalues_from_rates(&rates).unwrap();
            let dense = dense_channel_eigenvalues(&rates, k);
            for (a, b) in fast.iter().zip(&dense) {
                assert!((a - b).abs() < 1e-12);
            }
        }
    }
}

/// Frames interleaved with the layers, as one unitary.
fn rc_matrix(inst: &aces::generator::RcInstance) -> Mat {
    let n = inst.circuit.num_qubits();
    let mut u = pauli_matrix(&inst.frames[0]);
    for (layer, frame) in inst.circuit.layers().iter().zip(&inst.frames[1..]) {
        u = pauli_matrix(frame) * layer_matrix(layer, n) * u;
    }
    u
}

#[test]
fn randomized_compiling_preserves_unitary() {
    let mut rng = substream(14, "oracle-rc", &[]);
    for _ in 0..30 {
        let c = random_circuit(3, 4, &mut rng);
        let inst = sample_randomized_compiling(&c, &mut rng);
        assert_eq!(inst.frames.len(), c.depth() + 1);
        let (a, b) = (rc_matrix(&inst), circuit_matrix(&c));
        // equal up to a global phase
        let overlap = (b.adjoint() * &a).trace() / 8.0;
        assert!((overlap.norm() - 1.0).abs() < 1e-9);
        assert!((a - b * overlap).norm() < 1e-9);
    }
}

#[test]
fn randomized_compiling_preserves_tableau_at_width() {
    // tableau check without matrices: every generator maps the same way
    let mut rng = substream(15, "oracle-rc-wide", &[]);
    let n = 12;
    let c = random_circuit(n, 6, &mut rng);
    let inst = sample_randomized_compiling(&c, &mut rng);
    let parsed = aces::generator::RcInstance::from_text(&inst.to_text()).unwrap();
    assert_eq!(parsed, inst);
    for q in 0..n {
        for pauli in [aces::pauli::Pauli::X, aces::pauli::Pauli::Z] {
            let p = PauliString::single(n, q, pauli);
            let mut img = p.clone();
            for (layer, frame) in inst.circuit.layers().iter().zip(&inst.frames) {
                img = conj_frame(frame, &img);
                for g in layer {
                    img = conjugate_gate(g, &img).unwrap();
                }
            }
            img = conj_frame(inst.frames.last().unwrap(), &img);
            let ideal = propagate(&c, &p).unwrap().output;
            assert_eq!(img.unsigned(), ideal.unsigned());
        }
    }
}

fn conj_frame(frame: &PauliString, p: &PauliString) -> PauliString {
    let anti = !frame.commutes_with(p).unwrap();
    let mut out = p.clone();
    if anti {
        out.negate();
    }
    out
}

/// Transfer matrix of `total` relative to the ideal gate `u`.
fn relative_ptm(total: &Mat, u: &Mat, basis: &[PauliString]) -> Vec<Vec<f64>> {
    basis
        .iter()
        .map(|pi| {
            let out = pauli_matrix(&dense_conjugate(u, pi));
            basis
                .iter()
                .map(|pj| ((&out * total * pauli_matrix(pj) * total.adjoint()).trace() / 4.0).re)
                .collect()
        })
        .collect()
}

#[test]
fn twirl_average_of_coherent_error_is_pauli() {
    // a Z rotation before a CX mixes X and Y; averaged over the twirl it is
    // dephasing, with eigenvalue cos(theta) on Paulis that are X or Y on qubit 0
    let g = GateIdentity::new(GateKind::Cx, &[0, 1]).unwrap();
    let theta: f64 = 0.3;
    let rz = Mat::from_row_slice(2, 2, &[c(1., 0.), c(0., 0.), c(0., 0.), C::from_polar(1.0, theta)]);
    let err = embed(&rz, &[0], 2);
    let u = gate_matrix(&g, 2);
    let basis = all_paulis(2);
    let bare = relative_ptm(&(&u * &err), &u, &basis);
    assert!(bare.iter().enumerate().any(|(i, r)| r.iter().enumerate().any(|(j, x)| i != j && x.abs() > 0.1)));
    let mut avg = vec![vec![0.0; 16]; 16];
    for twirl in &basis {
        let after = conjugate_gate(&g, twirl).unwrap().unsigned();
        let total = pauli_matrix(&after) * &u * &err * pauli_matrix(twirl);
        for (a, r) in avg.iter_mut().zip(relative_ptm(&total, &u, &basis)) {
            for (x, y) in a.iter_mut().zip(r) {
                *x += y / 16.0;
            }
        }
    }
    for (i, p) in basis.iter().enumerate() {
        for j in 0..16 {
            let expected = match (i == j, p.get(0)) {
                (false, _) => 0.0,
                (true, aces::pauli::Pauli::X | aces::pauli::Pauli::Y) => theta.cos(),
                (true, _) => 1.0,
            };
            assert!((avg[i][j] - expected).abs() < 1e-12, "{p} {j}: {}", avg[i][j]);
        }
    }
}

fn arb_rates(k: usize) -> impl Strategy<Value = Vec<f64>> {
    prop::collection::vec(0.0f64..1.0, 1 << (2 * k)).prop_map(|mut v| {
        let s: f64 = v.iter().sum::<f64>() + 1e-9;
        v.iter_mut().for_each(|x| *x /= s);
        let rest: f64 = v[1..].iter().sum();
        v[0] = 1.0 - rest;
        v
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn transform_round_trip(rates in prop_oneof![arb_rates(1), arb_rates(2)]) {
        let eig = eigenvalues_from_rates(&rates).unwrap();
        let back = rates_from_eigenvalues(&eig, 1e-12).unwrap();
        prop_assert!(!back.flagged);
        for (a, b) in rates.iter().zip(&back.rates) {
            prop_assert!((a - b).abs() < 1e-12);
        }
        let ch = PauliChannel::new(rates.clone()).unwrap();
        prop_assert!((ch.eigenvalue(PauliIndex::IDENTITY) - 1.0).abs() < 1e-12);
    }

    #[test]
    fn circuit_then_inverse_is_identity(seed in any::<u64>(), n in 1usize..6, depth in 0usize..6) {
        let mut rng = substream(seed, "prop-inverse", &[]);
        let c = random_circuit(n, depth, &mut rng);
        let p = random_pauli(n, &mut rng);
        let round = c.then(&c.inverse()).unwrap();
        prop_assert_eq!(propagate(&round, &p).unwrap().output, p);
    }

    #[test]
    fn circuit_text_round_trip(seed in any::<u64>(), n in 1usize..6, depth in 0usize..5) {
        let mut rng = substream(seed, "prop-text", &[]);
        let c = random_circuit(n, depth, &mut rng);
        prop_assert_eq!(Circuit::from_text(&c.to_text()).unwrap(), c);
    }

    #[test]
    fn conjugation_preserves_commutation(seed in any::<u64>(), n in 2usize..8) {
        let mut rng = substream(seed, "prop-comm", &[]);
        let c = random_circuit(n, 4, &mut rng);
        let (a, b) = (random_pauli(n, &mut rng), random_pauli(n, &mut rng));
        let (ia, ib) = (propagate(&c, &a).unwrap().output, propagate(&c, &b).unwrap().output);
        prop_assert_eq!(a.commutes_with(&b).unwrap(), ia.commutes_with(&ib).unwrap());
        prop_assert_eq!(a.weight() == 0, ia.weight() == 0);
    }
}
