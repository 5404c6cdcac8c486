//! Interleave permutations: constant-depth synthesis and the mergesort
//! decomposition of arbitrary permutations into interleave layers.

use serde::{Deserialize, Serialize};

use super::cascade::{emit_prefix_cascade, emit_prefix_uncascade};
use super::{CompileOptions, PermError};
use crate::circuit_ir::{CircuitBuilder, CompiledCircuit};
use crate::jw::Permutation;

/// How several `A` modes sharing one `B` partner are coupled.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum AGroupMode {
    /// Fold each group into its last qubit with a cascade, then one CZ.
    #[default]
    SecondaryCascade,
    /// One CZ per `A` mode onto the shared partner.
    DirectCz,
}

/// A permutation preserving order within `A = [0, split)` and within `B = [split, n)`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct InterleavePerm {
    pub p: Permutation,
    pub split: usize,
}

impl InterleavePerm {
    pub fn new(p: Permutation, split: usize) -> Result<Self, PermError> {
        let n = p.n();
        if split > n {
            return Err(PermError::NotInterleave(format!("split {split} exceeds {n} modes")));
        }
        let im = p.images();
        for (lo, hi) in [(0, split), (split, n)] {
            if let Some(k) = (lo + 1..hi).find(|&k| im[k - 1] > im[k]) {
                return Err(PermError::NotInterleave(format!("order reversed between {} and {k}", k - 1)));
            }
        }
        Ok(Self { p, split })
    }

    /// Riffle of two halves: `A` onto even slots, `B` onto odd slots.
    pub fn riffle(n: usize) -> Self {
        assert!(n % 2 == 0, "riffle needs an even mode count");
        let h = n / 2;
        let im = (0..n).map(|i| if i < h { 2 * i } else { 2 * (i - h) + 1 }).collect();
        Self { p: Permutation::new(im).expect("riffle is a bijection"), split: h }
    }

    pub fn n(&self) -> usize {
        self.p.n()
    }

    /// `c_i`: the number of `B` modes that overtake `A` mode `i`.
    fn crossings(&self) -> Vec<usize> {
        let im = self.p.images();
        let b = &im[self.split..];
        im[..self.split].iter().map(|&pi| b.partition_point(|&pj| pj < pi)).collect()
    }
}

/// Disjoint interleaves on contiguous position blocks `[offset, offset + n)`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct InterleaveLayer {
    pub parts: Vec<(usize, InterleavePerm)>,
}

impl InterleaveLayer {
    /// The layer as a permutation of `n` positions.
    pub fn permutation(&self, n: usize) -> Permutation {
        let mut im: Vec<usize> = (0..n).collect();
        for (off, ip) in &self.parts {
            for (k, &v) in ip.p.images().iter().enumerate() {
                im[off + k] = off + v;
            }
        }
        Permutation::new(im).expect("parts are disjoint bijections")
    }
}

/// Mergesort layers whose composition, first layer applied first, equals `p`.
///
/// Blocks are the power-of-two windows `[lo, lo + 2^k)` clipped to `n`, so
/// every layer count is at most `⌈log₂ n⌉`. Trivial merges are dropped.
pub fn decompose_into_interleaves(p: &Permutation) -> Vec<InterleaveLayer> {
    let n = p.n();
    let mut keys = p.images().to_vec();
    let mut layers = Vec::new();
    let mut size = 2;
    while size / 2 < n {
        let half = size / 2;
        let mut parts = Vec::new();
        for lo in (0..n).step_by(size) {
            let hi = (lo + size).min(n);
            if hi - lo <= half {
                continue;
            }
            let block = &keys[lo..hi];
            let mut order: Vec<usize> = (0..block.len()).collect();
            order.sort_by_key(|&t| block[t]);
            let mut local = vec![0; block.len()];
            for (rank, &t) in order.iter().enumerate() {
                local[t] = rank;
            }
            if local.iter().enumerate().all(|(t, &r)| t == r) {
                continue;
            }
            let sorted: Vec<usize> = order.iter().map(|&t| block[t]).collect();
            keys[lo..hi].copy_from_slice(&sorted);
            let ip = InterleavePerm::new(Permutation::new(local).expect("ranks"), half).expect("merge of sorted halves");
            parts.push((lo, ip));
        }
        if !parts.is_empty() {
            layers.push(InterleaveLayer { parts });
        }
        size *= 2;
    }
    layers
}

/// Emits `F_p` for an interleave acting on the positions `qubits`.
///
/// Order: prefix cascades, relabel by `p`, CZ layer, relabel back, inverse
/// cascades, relabel by `p`.
pub fn emit_interleave(b: &mut CircuitBuilder, qubits: &[usize], ip: &InterleavePerm, opts: &CompileOptions) {
    assert_eq!(qubits.len(), ip.n());
    if ip.p.is_identity() {
        return;
    }
    let start = b.len();
    let prev = b.set_pass("interleave");
    emit_crossing_phases(b, qubits, ip, opts);
    let moved: Vec<usize> = ip.p.images().iter().map(|&v| qubits[v]).collect();
    b.permute(qubits, &moved);
    b.add_block(start, qubits.to_vec(), ip.p.images().to_vec());
    b.set_pass(&prev);
}

/// Emits `F_{p⁻¹}` for an interleave `p`: relabel by `p⁻¹`, then the
/// crossing phases of `p`, which are the crossings of `p⁻¹` seen from its
/// output side.
pub fn emit_interleave_inverse(b: &mut CircuitBuilder, qubits: &[usize], ip: &InterleavePerm, opts: &CompileOptions) {
    assert_eq!(qubits.len(), ip.n());
    if ip.p.is_identity() {
        return;
    }
    let start = b.len();
    let prev = b.set_pass("interleave");
    let inv = ip.p.inverse();
    let moved: Vec<usize> = inv.images().iter().map(|&v| qubits[v]).collect();
    b.permute(qubits, &moved);
    emit_crossing_phases(b, qubits, ip, opts);
    b.add_block(start, qubits.to_vec(), inv.images().to_vec());
    b.set_pass(&prev);
}

/// The diagonal part of `F_p`: a CZ on every crossing pair of `p`, by
/// position before the relabel.
fn emit_crossing_phases(b: &mut CircuitBuilder, qubits: &[usize], ip: &InterleavePerm, opts: &CompileOptions) {
    let s = ip.split;
    let c = ip.crossings();
    let max_c = c.iter().copied().max().unwrap_or(0);
    let b_targets: Vec<usize> = qubits[s..s + max_c].to_vec();

    // Maximal runs of A modes sharing the same partner s + c_i - 1.
    let mut groups: Vec<(Vec<usize>, usize)> = Vec::new();
    for (i, &ci) in c.iter().enumerate().filter(|(_, &ci)| ci > 0) {
        let j = s + ci - 1;
        match groups.last_mut() {
            Some((g, gj)) if *gj == j && opts.a_group == AGroupMode::SecondaryCascade => g.push(i),
            _ => groups.push((vec![i], j)),
        }
    }
    let group_qubits: Vec<Vec<usize>> = groups.iter().map(|(g, _)| g.iter().map(|&i| qubits[i]).collect()).collect();

    let opened = b.begin_parallel();
    emit_prefix_cascade(b, &b_targets, opts.cascade);
    for g in &group_qubits {
        emit_prefix_cascade(b, g, opts.cascade);
    }
    b.end_parallel(opened);

    let im = ip.p.images();
    let moved: Vec<usize> = im.iter().map(|&v| qubits[v]).collect();
    b.permute(qubits, &moved);
    for (g, j) in &groups {
        let rep = *g.last().expect("groups are nonempty");
        b.cz(moved[rep], moved[*j]);
    }
    b.permute(&moved, qubits);

    let opened = b.begin_parallel();
    emit_prefix_uncascade(b, &b_targets, opts.cascade);
    for g in &group_qubits {
        emit_prefix_uncascade(b, g, opts.cascade);
    }
    b.end_parallel(opened);
}

/// Emits the mergesort layers of `p` on `qubits`, parts of a layer in parallel.
pub fn emit_mergesort(b: &mut CircuitBuilder, qubits: &[usize], p: &Permutation, opts: &CompileOptions) {
    let start = b.len();
    for layer in decompose_into_interleaves(p) {
        let opened = b.begin_parallel();
        for (off, ip) in &layer.parts {
            emit_interleave(b, &qubits[*off..*off + ip.n()], ip, opts);
        }
        b.end_parallel(opened);
        b.next_layer();
    }
    if b.len() > start {
        b.add_block(start, qubits.to_vec(), p.images().to_vec());
    }
}

pub fn synth_interleave(ip: &InterleavePerm) -> CompiledCircuit {
    synth_interleave_with(ip, &CompileOptions::default())
}

pub fn synth_interleave_with(ip: &InterleavePerm, opts: &CompileOptions) -> CompiledCircuit {
    let n = ip.n();
    let mut b = CircuitBuilder::new(n);
    let qubits: Vec<usize> = (0..n).collect();
    emit_interleave(&mut b, &qubits, ip, opts);
    b.finish()
}
