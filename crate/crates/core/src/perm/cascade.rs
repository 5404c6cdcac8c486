//! CNOT cascades computing prefix parities, serial or with measured ancillas.

use crate::circuit_ir::{CircuitBuilder, CompiledCircuit};
use crate::jw::PauliAxis;

/// How a CNOT cascade is realized.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CascadeMode {
    /// Ancillas, two CNOT layers, mid-circuit measurement and Pauli feedforward.
    #[default]
    ConstantDepth,
    /// A plain chain of CNOTs.
    Serial,
}

/// Replaces `t_k` by `t_0 ⊕ … ⊕ t_k` for every `k`.
///
/// Serial mode is the chain `CNOT(t_0→t_1), CNOT(t_1→t_2), …`. The
/// constant-depth form puts one `|+>` ancilla `a_j` on every link:
/// `CNOT(a_j→t_{j+1})`, then `CNOT(t_j→a_j)`, a Z measurement of `a_j` and
/// an X on `t_{j+1}` when `s_0 ⊕ … ⊕ s_j = 1`.
pub fn emit_prefix_cascade(b: &mut CircuitBuilder, targets: &[usize], mode: CascadeMode) {
    let m = targets.len();
    if m < 2 {
        return;
    }
    if m == 2 || mode == CascadeMode::Serial {
        for w in targets.windows(2) {
            b.cnot(w[0], w[1]);
        }
        return;
    }
    let anc: Vec<usize> = (0..m - 1).map(|_| b.alloc_plus_ancilla()).collect();
    for (j, &a) in anc.iter().enumerate() {
        b.cnot(a, targets[j + 1]);
    }
    for (j, &a) in anc.iter().enumerate() {
        b.cnot(targets[j], a);
    }
    let outcomes: Vec<u32> = anc.iter().map(|&a| b.measure_z(a)).collect();
    for j in 0..m - 1 {
        b.cond_pauli(PauliAxis::X, targets[j + 1], outcomes[..=j].to_vec(), 1);
    }
    for a in anc {
        b.release(a);
    }
}

/// Inverse of [`emit_prefix_cascade`]: `t_k ← t_k ⊕ t_{k−1}` from the old values.
///
/// The constant-depth form copies `t_{k−1}` onto a `|0>` ancilla `a_k`,
/// adds it into `t_k`, measures `a_k` in the X basis and applies Z on every
/// `t_j` with `j < k` when `s_k = 1`.
pub fn emit_prefix_uncascade(b: &mut CircuitBuilder, targets: &[usize], mode: CascadeMode) {
    let m = targets.len();
    if m < 2 {
        return;
    }
    if m == 2 || mode == CascadeMode::Serial {
        for w in targets.windows(2).rev() {
            b.cnot(w[0], w[1]);
        }
        return;
    }
    let anc: Vec<usize> = (1..m).map(|_| b.alloc_ancilla()).collect();
    for (k, &a) in anc.iter().enumerate() {
        b.cnot(targets[k], a);
    }
    for (k, &a) in anc.iter().enumerate() {
        b.cnot(a, targets[k + 1]);
    }
    let outcomes: Vec<u32> = anc.iter().map(|&a| b.measure_x(a)).collect();
    for j in 0..m - 1 {
        b.cond_pauli(PauliAxis::Z, targets[j], outcomes[j..].to_vec(), 1);
    }
    for a in anc {
        b.release(a);
    }
}

/// Prefix-parity cascade on system qubits `targets` of a register sized to fit them.
pub fn synth_cnot_cascade(targets: &[usize], mode: CascadeMode) -> CompiledCircuit {
    let n = targets.iter().map(|&t| t + 1).max().unwrap_or(0);
    let mut b = CircuitBuilder::new(n);
    b.set_pass("cascade");
    emit_prefix_cascade(&mut b, targets, mode);
    b.finish()
}
