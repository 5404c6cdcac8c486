use ferriq::circuit_ir::{cost_report, Gate};
use ferriq::jw::{jw_majorana, OrderingMap, PauliAxis, PauliString, Permutation};
use ferriq::majorana::{compile_majorana_permutation, compile_majorana_permutation_with, u_lms_layer, MajoranaPermutation};
use ferriq::perm::{compile_permutation, CascadeMode, CompileOptions, Strategy as Plan};
use ferriq::verify::fock::majorana_permutation_unitary;
use ferriq::verify::{pauli_conjugate, unitary_equal_up_to_phase, unitary_of, verify_channel, verify_majorana_circuit};
use proptest::prelude::*;
use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn mperm(v: &[usize]) -> MajoranaPermutation {
    MajoranaPermutation::new(Permutation::new(v.to_vec()).unwrap()).unwrap()
}

#[test]
fn u_lms_swaps_odd_majoranas_of_each_pair() {
    // Frozen from conjugating each doubled-register Majorana through the layer.
    for n in [1, 3] {
        let c = u_lms_layer(n);
        let m = OrderingMap::identity(2 * n);
        for i in 0..n {
            let fixed = [4 * i, 4 * i + 3];
            for mu in fixed {
                let out = pauli_conjugate(&c, &jw_majorana(&m, mu)).unwrap();
                assert_eq!(out.base, jw_majorana(&m, mu));
            }
            let out = pauli_conjugate(&c, &jw_majorana(&m, 4 * i + 1)).unwrap();
            assert_eq!(out.base, jw_majorana(&m, 4 * i + 2));
            let back = pauli_conjugate(&c, &jw_majorana(&m, 4 * i + 2)).unwrap();
            let mut want = jw_majorana(&m, 4 * i + 1);
            want.negate();
            assert_eq!(back.base, want);
        }
    }
    let c = u_lms_layer(1);
    assert_eq!(c.len(), 1);
    assert!(c.instructions[0].gate.is_clifford());
}

#[test]
fn u_lms_twice_is_a_pauli() {
    let c = u_lms_layer(2).concat(&u_lms_layer(2));
    let u = unitary_of(&c).unwrap();
    let xx = PauliString::parse("XXXX").unwrap().to_dense();
    assert!(unitary_equal_up_to_phase(&u, &xx, 1e-12).unwrap());
}

#[test]
fn identity_is_empty() {
    let c = compile_majorana_permutation(&mperm(&[0, 1, 2, 3]));
    assert!(c.is_empty());
    assert!(verify_majorana_circuit(&c, &[0, 1, 2, 3]).pass);
}

#[test]
fn cyclic_shift_on_four_majoranas() {
    let p = [1, 2, 3, 0];
    let c = compile_majorana_permutation(&mperm(&p));
    let r = verify_majorana_circuit(&c, &p);
    assert!(r.pass, "{:?}", r.failures);
    assert_eq!(r.checked, 4);
}

#[test]
fn odd_length_is_rejected() {
    assert!(MajoranaPermutation::new(Permutation::identity(3)).is_err());
}

#[test]
fn random_gadgets_match_direct_rotation() {
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    let serial = CompileOptions { cascade: CascadeMode::Serial, ..Default::default() };
    for _ in 0..50 {
        let mut v: Vec<usize> = (0..6).collect();
        v.shuffle(&mut rng);
        let c = compile_majorana_permutation_with(&mperm(&v), Plan::Mergesort, &serial);
        let want = majorana_permutation_unitary(3, &v).unwrap();
        verify_channel(&c, &want, 1e-8).unwrap_or_else(|e| panic!("{v:?}: {e}"));
    }
}

#[test]
fn overhead_beyond_fermionic_permutation() {
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    for n in 1..=12 {
        for _ in 0..5 {
            let mut v: Vec<usize> = (0..2 * n).collect();
            v.shuffle(&mut rng);
            let mp = mperm(&v);
            let c = compile_majorana_permutation(&mp);
            if mp.p.is_identity() {
                continue;
            }
            let base = compile_permutation(&mp.p, Plan::Auto);
            let (rc, rb) = (cost_report(&c), cost_report(&base));
            assert_eq!(rc.clifford_count - rb.clifford_count, 2 * n);
            assert_eq!(rc.measurements - rb.measurements, n);
            assert_eq!(rc.ancilla_peak, rb.ancilla_peak + n);
            assert_eq!(c.count(|g| matches!(g, Gate::Rxx(_))), 2 * n);
        }
    }
}

#[test]
fn total_parity_follows_permutation_sign() {
    for (p, odd) in [([2, 3, 0, 1, 4, 5], false), ([1, 0, 3, 2, 4, 5], false), ([2, 3, 0, 1, 5, 4], true)] {
        let c = compile_majorana_permutation(&mperm(&p));
        let mut parity = PauliString::identity(c.n_qubits());
        for q in 0..3 {
            parity.set_letter(q, Some(PauliAxis::Z));
        }
        let out = pauli_conjugate(&c, &parity).unwrap();
        assert!(out.is_outcome_independent());
        let mut want = parity.clone();
        if odd {
            want.negate();
        }
        assert_eq!(out.base, want, "{p:?}");
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn gadget_maps_every_majorana(v in Just((0..12usize).collect::<Vec<_>>()).prop_shuffle()) {
        let c = compile_majorana_permutation(&mperm(&v));
        let r = verify_majorana_circuit(&c, &v);
        prop_assert!(r.pass, "{:?} {:?}", r.error, r.failures.first());
    }
}
