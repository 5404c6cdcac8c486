//! Closed-form permutations (reflections, riffles, axis swaps) and their
//! deformations by mode deletion and duplication.

use serde::{Deserialize, Serialize};

use super::ancilla_cz::{emit_ancilla_cz, reflection_1d_plan, reflection_2d_plan};
use super::cascade::{emit_prefix_cascade, emit_prefix_uncascade};
use super::{CompileOptions, PermError};
use crate::circuit_ir::{CircuitBuilder, CompiledCircuit};
use crate::jw::{PauliAxis, Permutation};

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum StructuredKind {
    /// `i → n-1-i`.
    Reflect1D(usize),
    /// Row-major to column-major: `r·L_c + c → c·L_r + r`.
    Reflect2D(usize, usize),
    /// Riffle of the two halves of `n` modes.
    StructuredInterleave(usize),
    /// Exchanges axes `d` and `d-1` of a grid with extents `dims` (axis 0 fastest).
    AxisSwap(Vec<usize>, usize),
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct StructuredPerm {
    pub kind: StructuredKind,
    pub perm: Permutation,
}

impl StructuredPerm {
    pub fn new(kind: StructuredKind) -> Result<Self, PermError> {
        let images: Vec<usize> = match &kind {
            StructuredKind::Reflect1D(n) => (0..*n).rev().collect(),
            &StructuredKind::Reflect2D(lr, lc) => {
                if lr == 0 || lc == 0 {
                    return Err(PermError::Degenerate(format!("{lr}x{lc} grid")));
                }
                (0..lr * lc).map(|i| (i % lc) * lr + i / lc).collect()
            }
            &StructuredKind::StructuredInterleave(n) => {
                if n % 2 != 0 {
                    return Err(PermError::Degenerate(format!("riffle of {n} modes")));
                }
                (0..n).map(|i| (i % (n / 2)) * 2 + i / (n / 2)).collect()
            }
            StructuredKind::AxisSwap(dims, d) => axis_swap_images(dims, *d)?,
        };
        Ok(Self { kind, perm: Permutation::new(images)? })
    }

    pub fn n(&self) -> usize {
        self.perm.n()
    }
}

fn axis_swap_images(dims: &[usize], d: usize) -> Result<Vec<usize>, PermError> {
    if d == 0 || d >= dims.len() {
        return Err(PermError::AxisOutOfRange { d, axes: dims.len() });
    }
    if dims.contains(&0) {
        return Err(PermError::Degenerate(format!("extents {dims:?}")));
    }
    let mut swapped = dims.to_vec();
    swapped.swap(d, d - 1);
    let n: usize = dims.iter().product();
    Ok((0..n)
        .map(|idx| {
            let mut coords: Vec<usize> = Vec::with_capacity(dims.len());
            let mut rest = idx;
            for &l in dims {
                coords.push(rest % l);
                rest /= l;
            }
            coords.swap(d, d - 1);
            coords.iter().zip(&swapped).rev().fold(0, |acc, (&x, &l)| acc * l + x)
        })
        .collect())
}

/// Deformation of a base permutation: output mode `i` plays base mode `sigma[i]`.
///
/// Base modes outside the image of `sigma` are deleted; repeated values are
/// duplicated modes that travel together.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ModeMap {
    pub n_out: usize,
    pub n_in: usize,
    pub sigma: Vec<usize>,
}

impl ModeMap {
    pub fn new(n_in: usize, sigma: Vec<usize>) -> Result<Self, PermError> {
        if let Some((index, &value)) = sigma.iter().enumerate().find(|(_, &s)| s >= n_in) {
            return Err(PermError::SigmaOutOfRange { index, value, n_in });
        }
        if let Some(index) = (1..sigma.len()).find(|&i| sigma[i] < sigma[i - 1]) {
            return Err(PermError::NotMonotone { index });
        }
        Ok(Self { n_out: sigma.len(), n_in, sigma })
    }

    pub fn identity(n: usize) -> Self {
        Self { n_out: n, n_in: n, sigma: (0..n).collect() }
    }

    /// `n_in` groups of `copies` consecutive outputs each.
    pub fn duplicate(n_in: usize, copies: usize) -> Self {
        Self { n_out: n_in * copies, n_in, sigma: (0..n_in * copies).map(|i| i / copies).collect() }
    }

    /// Outputs ordered by `(base(sigma(i)), i)`.
    pub fn deformed_permutation(&self, base: &Permutation) -> Permutation {
        let mut order: Vec<usize> = (0..self.n_out).collect();
        order.sort_by_key(|&i| (base.apply(self.sigma[i]), i));
        let mut im = vec![0; self.n_out];
        for (rank, &i) in order.iter().enumerate() {
            im[i] = rank;
        }
        Permutation::new(im).expect("ranks")
    }
}

/// Emits the CZ part of `F_p` for a structured kind on positions `qubits`.
pub fn emit_core(b: &mut CircuitBuilder, qubits: &[usize], kind: &StructuredKind, opts: &CompileOptions) {
    match kind {
        StructuredKind::Reflect1D(n) => emit_ancilla_cz(b, qubits, &reflection_1d_plan(*n)),
        &StructuredKind::Reflect2D(lr, lc) => {
            if lr < 2 || lc < 2 {
                return;
            }
            // Row index (r, L_c-1-c) so the crossing matrix is L ⊗ L.
            let sys: Vec<usize> = (0..lr * lc).map(|a| qubits[(a / lc) * lc + (lc - 1 - a % lc)]).collect();
            emit_ancilla_cz(b, &sys, &reflection_2d_plan(lr, lc));
        }
        &StructuredKind::StructuredInterleave(n) => emit_core(b, qubits, &StructuredKind::Reflect2D(2, n / 2), opts),
        StructuredKind::AxisSwap(dims, d) => {
            let (ld, lp) = (dims[*d], dims[*d - 1]);
            if ld < 2 || lp < 2 {
                return;
            }
            let inner: usize = dims[..*d - 1].iter().product();
            let block = ld * lp * inner;
            let base = StructuredKind::Reflect2D(ld, lp);
            let map = ModeMap::duplicate(ld * lp, inner);
            let opened = b.begin_parallel();
            for chunk in qubits.chunks(block) {
                if inner == 1 {
                    emit_core(b, chunk, &base, opts);
                } else {
                    emit_deformed_core(b, chunk, &base, &map, opts);
                }
            }
            b.end_parallel(opened);
        }
    }
}

/// Runs the base core on an ancilla register holding the group parities of
/// `qubits` under `map`, then measures the register out with Z feedforward.
pub fn emit_deformed_core(
    b: &mut CircuitBuilder,
    qubits: &[usize],
    base: &StructuredKind,
    map: &ModeMap,
    opts: &CompileOptions,
) {
    assert_eq!(qubits.len(), map.n_out);
    let prev = b.set_pass("deformation");
    let reg: Vec<usize> = (0..map.n_in).map(|_| b.alloc_ancilla()).collect();
    let groups: Vec<Vec<usize>> = (0..map.n_in)
        .map(|a| (0..map.n_out).filter(|&i| map.sigma[i] == a).map(|i| qubits[i]).collect())
        .collect();
    let opened = b.begin_parallel();
    for (a, g) in groups.iter().enumerate().filter(|(_, g)| !g.is_empty()) {
        emit_prefix_cascade(b, g, opts.cascade);
        b.cnot(*g.last().expect("nonempty"), reg[a]);
        emit_prefix_uncascade(b, g, opts.cascade);
    }
    b.end_parallel(opened);
    emit_core(b, &reg, base, opts);
    b.set_pass("deformation");
    for (a, g) in groups.iter().enumerate() {
        let s = b.measure_x(reg[a]);
        for &q in g {
            b.cond_pauli(PauliAxis::Z, q, vec![s], 1);
        }
    }
    for q in reg {
        b.release(q);
    }
    b.set_pass(&prev);
}

/// Core followed by the relabeling `p`.
pub fn emit_structured(b: &mut CircuitBuilder, qubits: &[usize], sp: &StructuredPerm, opts: &CompileOptions) {
    let start = b.len();
    emit_core(b, qubits, &sp.kind, opts);
    relabel(b, qubits, &sp.perm, start);
}

pub fn emit_deformation(
    b: &mut CircuitBuilder,
    qubits: &[usize],
    base: &StructuredPerm,
    map: &ModeMap,
    opts: &CompileOptions,
) {
    let start = b.len();
    emit_deformed_core(b, qubits, &base.kind, map, opts);
    relabel(b, qubits, &map.deformed_permutation(&base.perm), start);
}

fn relabel(b: &mut CircuitBuilder, qubits: &[usize], p: &Permutation, start: usize) {
    let moved: Vec<usize> = p.images().iter().map(|&v| qubits[v]).collect();
    b.permute(qubits, &moved);
    if b.len() > start {
        b.add_block(start, qubits.to_vec(), p.images().to_vec());
    }
}

fn on_fresh(n: usize, f: impl FnOnce(&mut CircuitBuilder, &[usize])) -> CompiledCircuit {
    let mut b = CircuitBuilder::new(n);
    let qubits: Vec<usize> = (0..n).collect();
    f(&mut b, &qubits);
    b.finish()
}

pub fn synth_structured(sp: &StructuredPerm) -> CompiledCircuit {
    on_fresh(sp.n(), |b, q| emit_structured(b, q, sp, &CompileOptions::default()))
}

pub fn synth_reflection_1d(n: usize) -> CompiledCircuit {
    synth_structured(&StructuredPerm::new(StructuredKind::Reflect1D(n)).expect("always valid"))
}

pub fn synth_reflection_2d(l_r: usize, l_c: usize) -> Result<CompiledCircuit, PermError> {
    if l_r < 2 || l_c < 2 {
        return Err(PermError::Degenerate(format!("{l_r}x{l_c} reflection")));
    }
    Ok(synth_structured(&StructuredPerm::new(StructuredKind::Reflect2D(l_r, l_c))?))
}

pub fn apply_deformation(base: &StructuredPerm, map: &ModeMap) -> Result<CompiledCircuit, PermError> {
    apply_deformation_with(base, map, &CompileOptions::default())
}

pub fn apply_deformation_with(
    base: &StructuredPerm,
    map: &ModeMap,
    opts: &CompileOptions,
) -> Result<CompiledCircuit, PermError> {
    if map.n_in != base.n() {
        return Err(PermError::SizeMismatch { got: map.n_in, want: base.n() });
    }
    let map = ModeMap::new(map.n_in, map.sigma.clone())?;
    Ok(on_fresh(map.n_out, |b, q| emit_deformation(b, q, base, &map, opts)))
}

pub fn synth_axis_swap(dims: &[usize], d: usize) -> Result<CompiledCircuit, PermError> {
    Ok(synth_structured(&StructuredPerm::new(StructuredKind::AxisSwap(dims.to_vec(), d))?))
}
