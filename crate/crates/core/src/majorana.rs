//! Majorana permutations `χ_mu → χ_{p(mu)}` on `N` modes, realized as a
//! fermionic permutation on `2N` modes between two layers of `exp(-iπ/4·XX)`.
//!
//! Each system mode `i` is paired with an ancilla mode in `|0>` so that the
//! pair `(2i, 2i+1)` of the doubled register carries `χ_{2i}` and `χ_{2i+1}`
//! as even Majoranas. Permuting modes then permutes the original Majoranas.

use serde::{Deserialize, Serialize};

use crate::circuit_ir::{Angle, CircuitBuilder, CompiledCircuit};
use crate::jw::{JwError, PauliAxis, Permutation};
use crate::perm::{emit_permutation, CompileOptions, Strategy};

/// A permutation of `2N` Majorana indices.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct MajoranaPermutation {
    pub p: Permutation,
}

impl MajoranaPermutation {
    pub fn new(p: Permutation) -> Result<Self, JwError> {
        if p.n() % 2 != 0 {
            return Err(JwError::SizeMismatch(p.n(), p.n() + 1));
        }
        Ok(Self { p })
    }

    pub fn n_modes(&self) -> usize {
        self.p.n() / 2
    }
}

/// `exp(-iπ/4·X_a X_b)` on the pairs `(qubits[2i], qubits[2i+1])`; `inverse` flips the angle.
pub fn emit_u_lms(b: &mut CircuitBuilder, qubits: &[usize], inverse: bool) {
    let angle = if inverse { Angle::turns(-1, 4) } else { Angle::turns(1, 4) };
    for pair in qubits.chunks_exact(2) {
        b.rxx(pair[0], pair[1], angle);
    }
}

/// One `U_lms` layer on `2n` qubits.
pub fn u_lms_layer(n: usize) -> CompiledCircuit {
    let mut b = CircuitBuilder::new(2 * n);
    let qubits: Vec<usize> = (0..2 * n).collect();
    emit_u_lms(&mut b, &qubits, false);
    b.finish()
}

pub fn compile_majorana_permutation(mp: &MajoranaPermutation) -> CompiledCircuit {
    compile_majorana_permutation_with(mp, Strategy::Auto, &CompileOptions::default())
}

pub fn compile_majorana_permutation_with(
    mp: &MajoranaPermutation,
    strategy: Strategy,
    opts: &CompileOptions,
) -> CompiledCircuit {
    let n = mp.n_modes();
    let mut b = CircuitBuilder::new(n);
    let sys: Vec<usize> = (0..n).collect();
    emit_majorana_permutation(&mut b, &sys, mp, strategy, opts);
    b.finish()
}

/// Emits the gadget on the increasing system positions `sys`.
///
/// Ancillas in `|0>` are interleaved with the system by relabeling, so the
/// doubled register costs no gates. After the second layer every ancilla is
/// measured in Z and system mode `j` takes a Z when the outcomes of
/// ancillas `k < j` have odd parity.
pub fn emit_majorana_permutation(
    b: &mut CircuitBuilder,
    sys: &[usize],
    mp: &MajoranaPermutation,
    strategy: Strategy,
    opts: &CompileOptions,
) {
    let n = mp.n_modes();
    assert_eq!(sys.len(), n);
    if mp.p.is_identity() {
        return;
    }
    let prev = b.set_pass("majorana");
    let mut anc: Vec<usize> = (0..n).map(|_| b.alloc_ancilla()).collect();
    anc.sort_unstable();
    let register: Vec<usize> = sys.iter().chain(anc.iter()).copied().collect();
    let mut doubled = register.clone();
    doubled.sort_unstable();
    let spread: Vec<usize> = (0..n).map(|i| doubled[2 * i]).chain((0..n).map(|j| doubled[2 * j + 1])).collect();
    b.permute(&register, &spread);
    emit_u_lms(b, &doubled, false);
    b.next_layer();
    emit_permutation(b, &doubled, &mp.p, strategy, opts);
    b.next_layer();
    b.set_pass("majorana");
    emit_u_lms(b, &doubled, true);
    b.permute(&spread, &register);
    let outcomes: Vec<u32> = anc.iter().map(|&a| b.measure_z(a)).collect();
    for j in 1..n {
        b.cond_pauli(PauliAxis::Z, sys[j], outcomes[..j].to_vec(), 1);
    }
    for a in anc {
        b.release(a);
    }
    b.set_pass(&prev);
}
