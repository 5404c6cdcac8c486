use ferriq::circuit_ir::{Angle, CircuitBuilder, Gate, Instruction};
use ferriq::jw::{tunneling_matrix, PauliAxis, PauliString};
use ferriq::verify::fock::{max_abs, unitary_of, CMatrix};
use ferriq::verify::{channel_branches, pauli_conjugate, unitary_equal_up_to_phase};
use num_complex::Complex64;
use proptest::prelude::*;

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

#[test]
fn empty_circuit_keeps_operator() {
    let circ = CircuitBuilder::new(3).finish();
    let p = PauliString::parse("+XZY").unwrap();
    let out = pauli_conjugate(&circ, &p).unwrap();
    assert_eq!(out.base, p);
    assert!(out.is_outcome_independent());
}

#[test]
fn cnot_spreads_control_x() {
    let mut b = CircuitBuilder::new(2);
    b.cnot(0, 1);
    let out = pauli_conjugate(&b.finish(), &PauliString::parse("XI").unwrap()).unwrap();
    assert_eq!(out.base, PauliString::parse("XX").unwrap());
}

#[test]
fn identity_unitary() {
    let u = unitary_of(&CircuitBuilder::new(3).finish()).unwrap();
    assert_eq!(u, CMatrix::identity(8, 8));
}

#[test]
fn adjacent_hopping_quarter_turn_fixture() {
    // Frozen from the two-mode Fock oracle at α = π/2, β = 0.
    let m = tunneling_matrix(c(std::f64::consts::FRAC_PI_2, 0.0), c(0.0, 0.0));
    let want = [
        [c(1.0, 0.0), c(0.0, 0.0), c(0.0, 0.0), c(0.0, 0.0)],
        [c(0.0, 0.0), c(0.0, 0.0), c(0.0, -1.0), c(0.0, 0.0)],
        [c(0.0, 0.0), c(0.0, -1.0), c(0.0, 0.0), c(0.0, 0.0)],
        [c(0.0, 0.0), c(0.0, 0.0), c(0.0, 0.0), c(1.0, 0.0)],
    ];
    for r in 0..4 {
        for k in 0..4 {
            assert!((m[r][k] - want[r][k]).norm() < 1e-12, "entry ({r},{k}) = {}", m[r][k]);
        }
    }
}

#[test]
fn pairing_term_mixes_parity_blocks_only() {
    let m = tunneling_matrix(c(0.4, 0.1), c(0.3, -0.2));
    for (r, k) in [(0, 1), (0, 2), (1, 0), (2, 0), (1, 3), (3, 1), (2, 3), (3, 2)] {
        assert!(m[r][k].norm() < 1e-12);
    }
    assert!(m[0][3].norm() > 1e-3);
}

#[test]
fn measured_fanout_teleports_state() {
    // Move qubit 0 onto an ancilla: CNOT into |0>, measure the source in X,
    // fix with Z. The system register ends in the ancilla slot.
    let mut b = CircuitBuilder::new(1);
    let a = b.alloc_ancilla();
    b.cnot(0, a);
    let s = b.measure_x(0);
    b.cond_pauli(PauliAxis::Z, a, vec![s], 1);
    b.permute(&[0, a], &[a, 0]);
    let circ = b.finish();
    let branches = channel_branches(&circ).unwrap();
    assert_eq!(branches.len(), 2);
    for br in &branches {
        let k = &br.kraus * c(2f64.sqrt(), 0.0);
        assert!(unitary_equal_up_to_phase(&k, &CMatrix::identity(2, 2), 1e-9).unwrap());
    }
    for (p, want) in [("XI", "XI"), ("ZI", "ZI"), ("YI", "YI")] {
        let out = pauli_conjugate(&circ, &PauliString::parse(p).unwrap()).unwrap();
        assert_eq!(out.base, PauliString::parse(want).unwrap(), "{p}");
        assert!(out.is_outcome_independent(), "{p}");
    }
}

#[test]
fn missing_correction_is_outcome_dependent() {
    let mut b = CircuitBuilder::new(1);
    let a = b.alloc_ancilla();
    b.cnot(0, a);
    b.measure_x(0);
    b.permute(&[0, a], &[a, 0]);
    let out = pauli_conjugate(&b.finish(), &PauliString::parse("XI").unwrap()).unwrap();
    assert!(!out.is_outcome_independent());
}

fn clifford_gate() -> impl Strategy<Value = (u8, usize, usize, u8)> {
    (0u8..12, 0usize..5, 0usize..5, 0u8..4)
}

fn build(n: usize, gates: &[(u8, usize, usize, u8)]) -> ferriq::circuit_ir::CompiledCircuit {
    let mut b = CircuitBuilder::new(n);
    for &(kind, a, t, k) in gates {
        let (a, t) = (a % n, t % n);
        let two = a != t;
        let angle = Angle::turns(k as i64, 4);
        match kind {
            0 => b.h(a),
            1 => b.s(a),
            2 => b.sdg(a),
            3 => b.pauli(PauliAxis::Y, a),
            4 => b.pauli(PauliAxis::X, a),
            5 => b.rz(a, angle),
            6 if two => b.cnot(a, t),
            7 if two => b.cz(a, t),
            8 if two => b.swap(a, t),
            9 if two => b.rzz(a, t, angle),
            10 if two => b.rxx(a, t, angle),
            11 if two => b.push(Instruction::new(Gate::Permute { targets: vec![t, a] }, vec![a, t])),
            _ => b.pauli(PauliAxis::Z, a),
        }
    }
    b.finish()
}

fn pauli_from(n: usize, letters: &[u8], phase: u8) -> PauliString {
    let mut p = PauliString::identity(n);
    for (q, &l) in letters.iter().take(n).enumerate() {
        p.set_letter(q, [None, Some(PauliAxis::X), Some(PauliAxis::Y), Some(PauliAxis::Z)][l as usize]);
    }
    p.mul_phase(2 * phase);
    p
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn symbolic_matches_dense_conjugation(
        n in 1usize..=5,
        gates in prop::collection::vec(clifford_gate(), 0..30),
        letters in prop::collection::vec(0u8..4, 5),
        phase in 0u8..2,
    ) {
        let circ = build(n, &gates);
        let p = pauli_from(n, &letters, phase);
        let got = pauli_conjugate(&circ, &p).unwrap();
        prop_assert!(got.is_outcome_independent());
        let u = unitary_of(&circ).unwrap();
        let want = &u * p.to_dense() * u.adjoint();
        prop_assert!(max_abs(&(want - got.base.to_dense())) < 1e-9, "{} -> {}", p, got.base);
    }
}
