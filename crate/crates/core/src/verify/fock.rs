//! Dense statevector oracle over the Fock space of the qubit register.
//!
//! Basis index bit `q` is the occupation of qubit `q`. Fermionic operators
//! use the Jordan-Wigner convention of [`crate::jw`]: `c_q` carries a Z
//! string on every lower qubit.

use nalgebra::DMatrix;
use num_complex::Complex64;
use rayon::prelude::*;
use thiserror::Error;

use crate::circuit_ir::{CompiledCircuit, FermionicCircuit, Gate, GateKind, Matrix4};
use crate::jw::{jw_majorana, OrderingMap, PauliAxis};

pub type CMatrix = DMatrix<Complex64>;

const DEFAULT_CAP: usize = 14;
const PRUNE: f64 = 1e-20;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum FockError {
    #[error("{0} qubits exceeds the dense oracle cap of {1}")]
    CapExceeded(usize, usize),
    #[error("instruction {0} is a measurement; use channel_branches")]
    NotUnitary(usize),
    #[error("branch {outcomes:?}: ancillas are not in a computational basis state")]
    EntangledAncilla { outcomes: Vec<u8> },
    #[error("invalid gate: {0}")]
    InvalidGate(String),
}

/// Qubit cap for dense simulation; `FERRIQ_ORACLE_CAP` overrides the default of 14.
pub fn oracle_cap() -> usize {
    std::env::var("FERRIQ_ORACLE_CAP").ok().and_then(|v| v.parse().ok()).unwrap_or(DEFAULT_CAP)
}

fn check_cap(n: usize) -> Result<(), FockError> {
    let cap = oracle_cap();
    if n > cap {
        return Err(FockError::CapExceeded(n, cap));
    }
    Ok(())
}

/// Largest entry magnitude.
pub fn max_abs(m: &CMatrix) -> f64 {
    m.iter().map(|z| z.norm()).fold(0.0, f64::max)
}

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

/// Annihilation operator `c_q` on `n` qubits.
pub fn annihilation(n: usize, q: usize) -> CMatrix {
    let dim = 1usize << n;
    let mut m = CMatrix::zeros(dim, dim);
    let lower = (1usize << q) - 1;
    for b in 0..dim {
        if b >> q & 1 == 1 {
            let s = if (b & lower).count_ones() % 2 == 1 { -1.0 } else { 1.0 };
            m[(b ^ (1 << q), b)] = c(s, 0.0);
        }
    }
    m
}

/// Dense Majorana operator `χ_mu` in identity ordering.
pub fn majorana(n: usize, mu: usize) -> CMatrix {
    jw_majorana(&OrderingMap::identity(n), mu).to_dense()
}

/// `exp(−i·t·H)` for Hermitian `H`.
pub fn expm_hermitian(h: &CMatrix, t: f64) -> CMatrix {
    let eig = h.clone().symmetric_eigen();
    let v = &eig.eigenvectors;
    let d = CMatrix::from_diagonal(&eig.eigenvalues.map(|l| Complex64::from_polar(1.0, -t * l)));
    v * d * v.adjoint()
}

fn tunneling_generator(n: usize, i: usize, j: usize, alpha: Complex64, beta: Complex64) -> CMatrix {
    let ci = annihilation(n, i);
    let cj = annihilation(n, j);
    let a = ci.adjoint() * &cj * alpha + ci.adjoint() * cj.adjoint() * beta;
    &a + a.adjoint()
}

/// `exp[−i(α c_0†c_1 + β c_0†c_1† + h.c.)]` on two modes, mode 0 on the lower qubit.
pub fn two_mode_tunneling(alpha: Complex64, beta: Complex64) -> Matrix4 {
    let u = expm_hermitian(&tunneling_generator(2, 0, 1, alpha, beta), 1.0);
    let mut out = [[c(0.0, 0.0); 4]; 4];
    for (r, row) in out.iter_mut().enumerate() {
        for (k, v) in row.iter_mut().enumerate() {
            *v = u[(r, k)];
        }
    }
    out
}

/// Dense unitary of a fermionic circuit with mode `i` on qubit `i`.
pub fn fermionic_unitary(fc: &FermionicCircuit) -> Result<CMatrix, FockError> {
    let n = fc.n_modes;
    check_cap(n)?;
    let mut u = CMatrix::identity(1 << n, 1 << n);
    for layer in &fc.layers {
        for g in layer {
            let m = &g.modes;
            let step = match g.kind {
                GateKind::Tunneling { alpha, beta } => {
                    expm_hermitian(&tunneling_generator(n, m[0], m[1], alpha, beta), 1.0)
                }
                GateKind::Interaction { gamma, delta_i, delta_j } => {
                    let dim = 1usize << n;
                    CMatrix::from_diagonal(&nalgebra::DVector::from_fn(dim, |b, _| {
                        let ni = (b >> m[0] & 1) as f64;
                        let nj = (b >> m[1] & 1) as f64;
                        Complex64::from_polar(1.0, -(gamma * ni * nj + delta_i * ni + delta_j * nj))
                    }))
                }
                GateKind::MajoranaQuartic { coupling, dt } => {
                    let h = majorana(n, m[0]) * majorana(n, m[1]) * majorana(n, m[2]) * majorana(n, m[3]);
                    expm_hermitian(&h, coupling * dt)
                }
            };
            u = step * u;
        }
    }
    Ok(u)
}

/// Unitary `U` with `U χ_mu U† = χ_{perm[mu]}` on `n_modes` modes.
pub fn majorana_permutation_unitary(n_modes: usize, perm: &[usize]) -> Result<CMatrix, FockError> {
    assert_eq!(perm.len(), 2 * n_modes);
    check_cap(n_modes)?;
    let dim = 1usize << n_modes;
    let chis: Vec<CMatrix> = (0..2 * n_modes).map(|mu| majorana(n_modes, mu)).collect();
    let h = std::f64::consts::FRAC_1_SQRT_2;
    // exp(π/4·χ_a χ_b) = (1 + χ_a χ_b)/√2 sends χ_a → −χ_b and χ_b → χ_a.
    let rot = |a: usize, b: usize| (CMatrix::identity(dim, dim) + &chis[a] * &chis[b]) * c(h, 0.0);
    let mut u = CMatrix::identity(dim, dim);
    let mut seen = vec![false; perm.len()];
    for start in 0..perm.len() {
        if seen[start] {
            continue;
        }
        let mut cycle = vec![start];
        seen[start] = true;
        let mut cur = perm[start];
        while cur != start {
            seen[cur] = true;
            cycle.push(cur);
            cur = perm[cur];
        }
        for &other in &cycle[1..] {
            u = rot(start, other) * u;
        }
    }
    // Images that came out with a minus sign, indexed by the image Majorana.
    let flips: Vec<usize> = (0..perm.len())
        .filter(|&mu| {
            let img = &u * &chis[mu] * u.adjoint();
            max_abs(&(img - &chis[perm[mu]])) > 1e-9
        })
        .map(|mu| perm[mu])
        .collect();
    let fix: Vec<usize> = if flips.len() % 2 == 0 {
        flips
    } else {
        (0..perm.len()).filter(|mu| !flips.contains(mu)).collect()
    };
    let mut s = CMatrix::identity(dim, dim);
    for &mu in &fix {
        s *= &chis[mu];
    }
    Ok(s * u)
}

// ---------------------------------------------------------------- gate kernels

fn gate_1q(g: &Gate) -> Option<[[Complex64; 2]; 2]> {
    let z = c(0.0, 0.0);
    let o = c(1.0, 0.0);
    let h = std::f64::consts::FRAC_1_SQRT_2;
    Some(match g {
        Gate::H => [[c(h, 0.0), c(h, 0.0)], [c(h, 0.0), c(-h, 0.0)]],
        Gate::S => [[o, z], [z, c(0.0, 1.0)]],
        Gate::Sdg => [[o, z], [z, c(0.0, -1.0)]],
        Gate::X => [[z, o], [o, z]],
        Gate::Y => [[z, c(0.0, -1.0)], [c(0.0, 1.0), z]],
        Gate::Z => [[o, z], [z, -o]],
        Gate::Rz(a) => {
            let t = a.radians() / 2.0;
            [[Complex64::from_polar(1.0, -t), z], [z, Complex64::from_polar(1.0, t)]]
        }
        _ => return None,
    })
}

fn pauli_1q(axis: PauliAxis) -> Gate {
    match axis {
        PauliAxis::X => Gate::X,
        PauliAxis::Y => Gate::Y,
        PauliAxis::Z => Gate::Z,
    }
}

fn gate_2q(g: &Gate) -> Option<Matrix4> {
    let z = c(0.0, 0.0);
    let o = c(1.0, 0.0);
    let mut m = [[z; 4]; 4];
    match g {
        // index b(q0) + 2·b(q1), q0 = control
        Gate::Cnot => {
            for (r, k) in [(0, 0), (3, 1), (2, 2), (1, 3)] {
                m[r][k] = o;
            }
        }
        Gate::Cz => {
            for k in 0..4 {
                m[k][k] = if k == 3 { -o } else { o };
            }
        }
        Gate::Swap => {
            for (r, k) in [(0, 0), (2, 1), (1, 2), (3, 3)] {
                m[r][k] = o;
            }
        }
        Gate::Rzz(a) => {
            let t = a.radians() / 2.0;
            for k in 0..4 {
                let odd = (k & 1) ^ (k >> 1) == 1;
                m[k][k] = Complex64::from_polar(1.0, if odd { t } else { -t });
            }
        }
        Gate::Rxx(a) => {
            let t = a.radians() / 2.0;
            for k in 0..4 {
                m[k][k] = c(t.cos(), 0.0);
                m[3 - k][k] = c(0.0, -t.sin());
            }
        }
        Gate::Unitary2 { matrix, .. } => m = *matrix,
        _ => return None,
    }
    Some(m)
}

/// Columns of `state` are independent statevectors of `2^n` amplitudes.
fn apply_1q(state: &mut CMatrix, q: usize, u: &[[Complex64; 2]; 2]) {
    let dim = state.nrows();
    let bit = 1usize << q;
    state.as_mut_slice().par_chunks_mut(dim).for_each(|col| {
        for b in 0..dim {
            if b & bit == 0 {
                let (a0, a1) = (col[b], col[b | bit]);
                col[b] = u[0][0] * a0 + u[0][1] * a1;
                col[b | bit] = u[1][0] * a0 + u[1][1] * a1;
            }
        }
    });
}

fn apply_2q(state: &mut CMatrix, q0: usize, q1: usize, u: &Matrix4) {
    let dim = state.nrows();
    let (b0, b1) = (1usize << q0, 1usize << q1);
    state.as_mut_slice().par_chunks_mut(dim).for_each(|col| {
        for b in 0..dim {
            if b & (b0 | b1) == 0 {
                let idx = [b, b | b0, b | b1, b | b0 | b1];
                let a = idx.map(|i| col[i]);
                for (r, &i) in idx.iter().enumerate() {
                    col[i] = (0..4).map(|k| u[r][k] * a[k]).sum();
                }
            }
        }
    });
}

fn apply_permute(state: &mut CMatrix, qubits: &[usize], targets: &[usize]) {
    let dim = state.nrows();
    let map = |b: usize| {
        let mut out = b;
        for &q in qubits {
            out &= !(1 << q);
        }
        for (&q, &t) in qubits.iter().zip(targets) {
            out |= (b >> q & 1) << t;
        }
        out
    };
    let src = state.clone();
    for b in 0..dim {
        state.row_mut(map(b)).copy_from(&src.row(b));
    }
}

/// Projects qubit `q` onto `|v>`; returns the squared Frobenius norm kept.
fn project(state: &mut CMatrix, q: usize, v: usize) -> f64 {
    let dim = state.nrows();
    let mut kept = 0.0;
    for col in state.as_mut_slice().chunks_mut(dim) {
        for (b, a) in col.iter_mut().enumerate() {
            if (b >> q & 1) != v {
                *a = c(0.0, 0.0);
            } else {
                kept += a.norm_sqr();
            }
        }
    }
    kept
}

fn apply_unitary(state: &mut CMatrix, g: &Gate, qubits: &[usize]) -> Result<(), FockError> {
    if let Some(u) = gate_1q(g) {
        apply_1q(state, qubits[0], &u);
    } else if let Some(u) = gate_2q(g) {
        apply_2q(state, qubits[0], qubits[1], &u);
    } else if let Gate::Permute { targets } = g {
        apply_permute(state, qubits, targets);
    } else {
        return Err(FockError::InvalidGate(g.opcode().into()));
    }
    Ok(())
}

/// Dense unitary of a measurement-free circuit over all of its qubits.
pub fn unitary_of(circ: &CompiledCircuit) -> Result<CMatrix, FockError> {
    let n = circ.n_qubits();
    check_cap(n)?;
    let dim = 1usize << n;
    let mut state = CMatrix::identity(dim, dim);
    for (i, ins) in circ.instructions.iter().enumerate() {
        if !ins.gate.is_unitary_gate() && !matches!(ins.gate, Gate::Permute { .. }) {
            return Err(FockError::NotUnitary(i));
        }
        apply_unitary(&mut state, &ins.gate, &ins.qubits)?;
    }
    Ok(state)
}

/// One measurement record with its system-space operator.
#[derive(Clone, Debug)]
pub struct Branch {
    /// Outcome bit per circuit outcome id.
    pub outcomes: Vec<u8>,
    /// Final computational basis state of the ancillas (bit `a` is ancilla `a`).
    pub ancilla_state: usize,
    /// Kraus operator on the system qubits.
    pub kraus: CMatrix,
}

struct Pending {
    at: usize,
    state: CMatrix,
    outcomes: Vec<u8>,
    /// Qubits measured in the X basis and not yet rotated back; their content
    /// is a computational basis state in the rotated frame.
    rotated: Vec<bool>,
}

/// Per-outcome Kraus operators of `circ` with ancillas prepared in `|0>`.
///
/// Resets are unrecorded measurements, so several branches may share an
/// outcome record. Branches with negligible weight are dropped. An ancilla
/// measured in the X basis is compared in that basis.
pub fn channel_branches(circ: &CompiledCircuit) -> Result<Vec<Branch>, FockError> {
    run_branches(circ, None)
}

/// The single branch with the recorded outcomes `forced` (one bit per
/// outcome id). The Kraus operator is unnormalized; `None` if the record has
/// negligible weight.
pub fn branch_with_outcomes(circ: &CompiledCircuit, forced: &[u8]) -> Result<Option<Branch>, FockError> {
    if forced.len() != circ.outcome_count() {
        return Err(FockError::InvalidGate(format!("{} outcomes for {} measurements", forced.len(), circ.outcome_count())));
    }
    Ok(run_branches(circ, Some(forced))?.into_iter().next())
}

fn run_branches(circ: &CompiledCircuit, forced: Option<&[u8]>) -> Result<Vec<Branch>, FockError> {
    let n = circ.n_qubits();
    check_cap(n)?;
    let ns = circ.n_system;
    let dim = 1usize << n;
    let init = CMatrix::from_fn(dim, 1 << ns, |r, k| if r == k { c(1.0, 0.0) } else { c(0.0, 0.0) });
    let n_out = circ.outcome_count();
    let mut stack = vec![Pending { at: 0, state: init, outcomes: vec![0; n_out], rotated: vec![false; n] }];
    let mut done: Vec<Branch> = Vec::new();
    let hm = gate_1q(&Gate::H).unwrap();
    while let Some(Pending { at, mut state, mut outcomes, mut rotated }) = stack.pop() {
        let mut at = at;
        let mut alive = true;
        while alive && at < circ.instructions.len() {
            let ins = &circ.instructions[at];
            let q = ins.qubits.first().copied().unwrap_or(0);
            if let Gate::Permute { targets } = &ins.gate {
                let moved: Vec<bool> = ins.qubits.iter().map(|&s| rotated[s]).collect();
                for (&t, r) in targets.iter().zip(moved) {
                    rotated[t] = r;
                }
            } else {
                for &qq in &ins.qubits {
                    if std::mem::take(&mut rotated[qq]) {
                        apply_1q(&mut state, qq, &hm);
                    }
                }
            }
            match &ins.gate {
                Gate::MeasureZ | Gate::MeasureX | Gate::Reset | Gate::PrepPlus => {
                    let xbasis = matches!(ins.gate, Gate::MeasureX);
                    if xbasis {
                        apply_1q(&mut state, q, &hm);
                    }
                    let mut one = state.clone();
                    let w1 = project(&mut one, q, 1);
                    let w0 = project(&mut state, q, 0);
                    let finish = |s: &mut CMatrix, v: u8| {
                        if matches!(ins.gate, Gate::Reset | Gate::PrepPlus) && v == 1 {
                            apply_1q(s, q, &gate_1q(&Gate::X).unwrap());
                        }
                        if matches!(ins.gate, Gate::PrepPlus) {
                            apply_1q(s, q, &hm);
                        }
                    };
                    rotated[q] = xbasis;
                    let want = forced.zip(ins.outcome).map(|(f, id)| f[id as usize]);
                    let (w1, w0) = match want {
                        Some(0) => (0.0, w0),
                        Some(_) => (w1, 0.0),
                        None => (w1, w0),
                    };
                    if want == Some(1) {
                        state = one;
                        finish(&mut state, 1);
                        outcomes[ins.outcome.expect("forced outcome") as usize] = 1;
                        alive = w1 > PRUNE;
                    } else {
                        if w1 > PRUNE {
                            finish(&mut one, 1);
                            let mut o = outcomes.clone();
                            if let Some(id) = ins.outcome {
                                o[id as usize] = 1;
                            }
                            stack.push(Pending { at: at + 1, state: one, outcomes: o, rotated: rotated.clone() });
                        }
                        if w0 > PRUNE {
                            finish(&mut state, 0);
                        } else {
                            alive = false;
                        }
                    }
                }
                Gate::CondPauli(axis) => {
                    let cond = ins.cond.as_ref().expect("validated circuit");
                    let parity = cond.outcomes.iter().fold(0u8, |p, &o| p ^ outcomes[o as usize]);
                    if parity == cond.parity {
                        apply_1q(&mut state, q, &gate_1q(&pauli_1q(*axis)).unwrap());
                    }
                }
                g => apply_unitary(&mut state, g, &ins.qubits)?,
            }
            at += 1;
        }
        if alive {
            for q in 0..ns {
                if rotated[q] {
                    apply_1q(&mut state, q, &hm);
                }
            }
            done.push(contract_ancillas(state, ns, outcomes)?);
        }
    }
    done.sort_by(|x, y| x.outcomes.cmp(&y.outcomes));
    Ok(done)
}

fn contract_ancillas(state: CMatrix, ns: usize, outcomes: Vec<u8>) -> Result<Branch, FockError> {
    let sys_dim = 1usize << ns;
    let n_anc_states = state.nrows() / sys_dim;
    let weights: Vec<f64> = (0..n_anc_states)
        .map(|a| state.rows(a * sys_dim, sys_dim).iter().map(|z| z.norm_sqr()).sum())
        .collect();
    let total: f64 = weights.iter().sum();
    let (best, wbest) = weights.iter().enumerate().fold((0, 0.0), |acc, (a, &w)| if w > acc.1 { (a, w) } else { acc });
    if total - wbest > 1e-9 * total.max(1e-30) {
        return Err(FockError::EntangledAncilla { outcomes });
    }
    Ok(Branch { kraus: state.rows(best * sys_dim, sys_dim).into_owned(), ancilla_state: best, outcomes })
}

/// `‖u − e^{iφ}v‖_max ≤ tol` with φ taken from the largest-magnitude entry.
pub fn unitary_equal_up_to_phase(u: &CMatrix, v: &CMatrix, tol: f64) -> Result<bool, FockError> {
    if u.shape() != v.shape() {
        return Err(FockError::InvalidGate(format!("shape {:?} vs {:?}", u.shape(), v.shape())));
    }
    let Some((idx, _)) = v.iter().enumerate().max_by(|a, b| a.1.norm().total_cmp(&b.1.norm())) else {
        return Ok(true);
    };
    if v[idx].norm() < 1e-300 {
        return Ok(max_abs(u) <= tol);
    }
    let ratio = u[idx] / v[idx];
    let phase = if ratio.norm() > 0.0 { ratio / ratio.norm() } else { c(1.0, 0.0) };
    Ok(max_abs(&(u - v * phase)) <= tol)
}

/// Checks that every branch is a scaled copy of `target` and the weights
/// complete to the identity.
pub fn check_deterministic_channel(branches: &[Branch], target: &CMatrix, tol: f64) -> Result<(), String> {
    let dim = target.nrows();
    let mut completeness = CMatrix::zeros(dim, dim);
    for b in branches {
        completeness += b.kraus.adjoint() * &b.kraus;
        let scale = (b.kraus.norm_squared() / dim as f64).sqrt();
        let normalized = &b.kraus * c(1.0 / scale, 0.0);
        if !unitary_equal_up_to_phase(&normalized, target, tol).map_err(|e| e.to_string())? {
            return Err(format!("branch {:?} differs from the target", b.outcomes));
        }
    }
    let dev = max_abs(&(completeness - CMatrix::identity(dim, dim)));
    if dev > tol {
        return Err(format!("Kraus completeness off by {dev:.3e}"));
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn annihilation_anticommutes() {
        let n = 3;
        for i in 0..n {
            for j in 0..n {
                let (ci, cj) = (annihilation(n, i), annihilation(n, j));
                let anti = &ci * cj.adjoint() + cj.adjoint() * &ci;
                let want = if i == j { CMatrix::identity(8, 8) } else { CMatrix::zeros(8, 8) };
                assert!(max_abs(&(anti - want)) < 1e-12);
            }
        }
    }

    #[test]
    fn majorana_matches_modes() {
        let c1 = annihilation(3, 1);
        let x = majorana(3, 2);
        let y = majorana(3, 3);
        assert!(max_abs(&(x - (&c1 + c1.adjoint()))) < 1e-12);
        assert!(max_abs(&(y - (c1.adjoint() - &c1) * c(0.0, 1.0))) < 1e-12);
    }

    #[test]
    fn phase_equality() {
        let x = majorana(1, 0);
        let z = CMatrix::from_diagonal(&nalgebra::DVector::from_vec(vec![c(1.0, 0.0), c(-1.0, 0.0)]));
        assert!(unitary_equal_up_to_phase(&x, &x, 1e-12).unwrap());
        assert!(unitary_equal_up_to_phase(&(-&x), &x, 1e-12).unwrap());
        assert!(!unitary_equal_up_to_phase(&x, &z, 1e-6).unwrap());
    }

    #[test]
    fn majorana_permutation_reference() {
        let perm = [2, 0, 1, 3, 5, 4];
        let u = majorana_permutation_unitary(3, &perm).unwrap();
        for (mu, &img) in perm.iter().enumerate() {
            let got = &u * majorana(3, mu) * u.adjoint();
            assert!(max_abs(&(got - majorana(3, img))) < 1e-10);
        }
    }
}
