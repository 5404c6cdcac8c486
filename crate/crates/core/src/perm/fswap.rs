//! Adjacent fermionic-swap networks, the quadratic-cost reference.

use crate::circuit_ir::{CircuitBuilder, CompiledCircuit};
use crate::jw::Permutation;

/// Odd-even transposition sort; each crossing is `CZ` then `SWAP`.
pub fn emit_fswap(b: &mut CircuitBuilder, qubits: &[usize], p: &Permutation) {
    let n = p.n();
    let start = b.len();
    let prev = b.set_pass("fswap");
    let mut keys = p.images().to_vec();
    for round in 0..n {
        let mut moved = false;
        for q in (round % 2..n.saturating_sub(1)).step_by(2) {
            if keys[q] > keys[q + 1] {
                b.cz(qubits[q], qubits[q + 1]);
                b.swap(qubits[q], qubits[q + 1]);
                keys.swap(q, q + 1);
                moved = true;
            }
        }
        if !moved && keys.windows(2).all(|w| w[0] < w[1]) {
            break;
        }
        b.next_layer();
    }
    if b.len() > start {
        b.add_block(start, qubits.to_vec(), p.images().to_vec());
    }
    b.set_pass(&prev);
}

pub fn synth_fswap_network(p: &Permutation) -> CompiledCircuit {
    let mut b = CircuitBuilder::new(p.n());
    let qubits: Vec<usize> = (0..p.n()).collect();
    emit_fswap(&mut b, &qubits, p);
    b.finish()
}
