//! Fermionic permutation synthesis: `F_p` maps the encoding `m` to `p∘m`.
//!
//! `F_p` is the CZ pattern on crossing pairs followed by the qubit
//! relabeling `p`. Constructions emit into a [`CircuitBuilder`] on a list of
//! positions so they nest inside larger circuits.

pub mod ancilla_cz;
pub mod cascade;
pub mod fswap;
pub mod interleave;
pub mod structured;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::circuit_ir::{CircuitBuilder, CompiledCircuit};
use crate::f2core::{CzSpec, F2Error};
use crate::jw::{JwError, OrderingMap, Permutation};

pub use ancilla_cz::{plan_rows, synth_via_ancilla_cz, synth_via_ancilla_cz_with, RowPlan, Source};
pub use cascade::{synth_cnot_cascade, CascadeMode};
pub use fswap::synth_fswap_network;
pub use interleave::{
    decompose_into_interleaves, synth_interleave, synth_interleave_with, AGroupMode, InterleaveLayer, InterleavePerm,
};
pub use structured::{
    apply_deformation, apply_deformation_with, synth_axis_swap, synth_reflection_1d, synth_reflection_2d,
    synth_structured, ModeMap, StructuredKind, StructuredPerm,
};

pub const DEFAULT_EXACT_THRESHOLD: usize = 20;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum PermError {
    #[error("not an interleave: {0}")]
    NotInterleave(String),
    #[error("degenerate size: {0}")]
    Degenerate(String),
    #[error("sigma[{index}] = {value} out of range for {n_in} base modes")]
    SigmaOutOfRange { index: usize, value: usize, n_in: usize },
    #[error("sigma decreases at output {index}")]
    NotMonotone { index: usize },
    #[error("size mismatch: got {got}, want {want}")]
    SizeMismatch { got: usize, want: usize },
    #[error("axis {d} out of range for {axes} axes")]
    AxisOutOfRange { d: usize, axes: usize },
    #[error(transparent)]
    F2(#[from] F2Error),
    #[error(transparent)]
    Jw(#[from] JwError),
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Strategy {
    /// Closed-form kinds, deformations, block splits and single interleaves, else mergesort.
    #[default]
    Auto,
    Mergesort,
    /// Closed-form kinds and their deformations, else mergesort.
    Structured,
    Fswap,
}

impl std::str::FromStr for Strategy {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "auto" => Ok(Self::Auto),
            "mergesort" => Ok(Self::Mergesort),
            "structured" => Ok(Self::Structured),
            "fswap" => Ok(Self::Fswap),
            _ => Err(format!("unknown strategy `{s}`")),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CompileOptions {
    pub cascade: CascadeMode,
    pub a_group: AGroupMode,
    pub exact_threshold: usize,
}

impl Default for CompileOptions {
    fn default() -> Self {
        Self { cascade: CascadeMode::default(), a_group: AGroupMode::default(), exact_threshold: DEFAULT_EXACT_THRESHOLD }
    }
}

/// CZ pairs of `F_p` for `p = m1 ∘ m0⁻¹`, in mode indices: modes whose
/// relative order differs between the two encodings.
pub fn cz_parity_matrix(m0: &OrderingMap, m1: &OrderingMap) -> Result<CzSpec, PermError> {
    let n = m0.n();
    if m1.n() != n {
        return Err(PermError::SizeMismatch { got: m1.n(), want: n });
    }
    let pairs = (0..n).flat_map(|i| (i + 1..n).map(move |j| (i, j))).filter(|&(i, j)| {
        (m0.qubit(i) < m0.qubit(j)) != (m1.qubit(i) < m1.qubit(j))
    });
    Ok(CzSpec::from_cz_list(n, pairs))
}

/// Exact closed-form match of a reflection.
pub fn recognize_structured(p: &Permutation) -> Option<StructuredPerm> {
    let n = p.n();
    if n < 2 {
        return None;
    }
    let mut kinds = vec![StructuredKind::Reflect1D(n)];
    kinds.extend((2..=n / 2).filter(|lr| n % lr == 0).map(|lr| StructuredKind::Reflect2D(lr, n / lr)));
    kinds.into_iter().map(|k| StructuredPerm::new(k).expect("valid sizes")).find(|sp| &sp.perm == p)
}

/// Collapses runs `p(i+1) = p(i)+1` and matches the quotient against a
/// closed form, giving a base and a duplication map.
pub fn recognize_deformation(p: &Permutation) -> Option<(StructuredPerm, ModeMap)> {
    let im = p.images();
    let n = im.len();
    let mut sigma = vec![0; n];
    let mut starts = Vec::new();
    for i in 0..n {
        if i == 0 || im[i] != im[i - 1] + 1 {
            starts.push(im[i]);
        }
        sigma[i] = starts.len() - 1;
    }
    if starts.len() == n || starts.len() < 2 {
        return None;
    }
    let mut order: Vec<usize> = (0..starts.len()).collect();
    order.sort_by_key(|&k| starts[k]);
    let mut base = vec![0; starts.len()];
    for (rank, &k) in order.iter().enumerate() {
        base[k] = rank;
    }
    let sp = recognize_structured(&Permutation::new(base).ok()?)?;
    Some((sp, ModeMap::new(starts.len(), sigma).expect("monotone by construction")))
}

/// Smallest `k < n` with `p` mapping `[0, k)` onto itself.
fn block_split(p: &Permutation) -> Option<usize> {
    let mut max = 0;
    for (k, &v) in p.images().iter().enumerate().take(p.n().saturating_sub(1)) {
        max = max.max(v);
        if max == k {
            return Some(k + 1);
        }
    }
    None
}

fn single_interleave(p: &Permutation) -> Option<InterleavePerm> {
    let im = p.images();
    let split = (1..im.len()).find(|&k| im[k - 1] > im[k])?;
    InterleavePerm::new(p.clone(), split).ok()
}

fn sub_permutation(p: &Permutation, lo: usize, hi: usize) -> Permutation {
    Permutation::new(p.images()[lo..hi].iter().map(|&v| v - lo).collect()).expect("block is closed")
}

/// Emits `F_p` on the positions `qubits`, which must be increasing so that
/// position order is Jordan-Wigner order.
pub fn emit_permutation(
    b: &mut CircuitBuilder,
    qubits: &[usize],
    p: &Permutation,
    strategy: Strategy,
    opts: &CompileOptions,
) {
    assert_eq!(qubits.len(), p.n());
    debug_assert!(qubits.windows(2).all(|w| w[0] < w[1]), "positions must be increasing");
    if p.is_identity() {
        return;
    }
    match strategy {
        Strategy::Fswap => fswap::emit_fswap(b, qubits, p),
        Strategy::Mergesort => interleave::emit_mergesort(b, qubits, p, opts),
        Strategy::Structured => {
            if let Some(sp) = recognize_structured(p) {
                structured::emit_structured(b, qubits, &sp, opts);
            } else if let Some((sp, map)) = recognize_deformation(p) {
                structured::emit_deformation(b, qubits, &sp, &map, opts);
            } else {
                interleave::emit_mergesort(b, qubits, p, opts);
            }
        }
        Strategy::Auto => {
            if let Some(sp) = recognize_structured(p) {
                structured::emit_structured(b, qubits, &sp, opts);
            } else if let Some((sp, map)) = recognize_deformation(p) {
                let deformed = |b: &mut CircuitBuilder, q: &[usize]| structured::emit_deformation(b, q, &sp, &map, opts);
                match single_interleave(p) {
                    Some(ip) if two_qubit_cost(p.n(), |b, q| interleave::emit_interleave(b, q, &ip, opts)) <= two_qubit_cost(p.n(), deformed) => {
                        interleave::emit_interleave(b, qubits, &ip, opts)
                    }
                    _ => deformed(b, qubits),
                }
            } else if let Some(k) = block_split(p) {
                let start = b.len();
                let opened = b.begin_parallel();
                emit_permutation(b, &qubits[..k], &sub_permutation(p, 0, k), strategy, opts);
                emit_permutation(b, &qubits[k..], &sub_permutation(p, k, p.n()), strategy, opts);
                b.end_parallel(opened);
                b.add_block(start, qubits.to_vec(), p.images().to_vec());
            } else if let Some(ip) = single_interleave(p) {
                interleave::emit_interleave(b, qubits, &ip, opts);
            } else {
                interleave::emit_mergesort(b, qubits, p, opts);
            }
        }
    }
}

/// Two-qubit gate count of an emission on a fresh register of `n` qubits.
fn two_qubit_cost(n: usize, emit: impl FnOnce(&mut CircuitBuilder, &[usize])) -> usize {
    let mut b = CircuitBuilder::new(n);
    let qubits: Vec<usize> = (0..n).collect();
    emit(&mut b, &qubits);
    b.instructions().iter().filter(|i| i.gate.is_unitary_gate() && i.qubits.len() == 2).count()
}

pub fn compile_permutation(p: &Permutation, strategy: Strategy) -> CompiledCircuit {
    compile_permutation_with(p, strategy, &CompileOptions::default())
}

pub fn compile_permutation_with(p: &Permutation, strategy: Strategy, opts: &CompileOptions) -> CompiledCircuit {
    let mut b = CircuitBuilder::new(p.n());
    let qubits: Vec<usize> = (0..p.n()).collect();
    emit_permutation(&mut b, &qubits, p, strategy, opts);
    b.finish()
}
