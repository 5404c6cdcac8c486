//! Single-particle tracking for number-conserving quadratic circuits.
//!
//! The transfer matrix `T` is defined by `U c_q† U† = Σ_{q'} T_{q'q} c_{q'}†`;
//! circuits compose as `T = T_2·T_1`.

use num_complex::Complex64;
use serde::Serialize;
use thiserror::Error;

use crate::circuit_ir::{CompiledCircuit, Gate, Matrix4};
use crate::verify::fock::{max_abs, CMatrix};

const TOL: f64 = 1e-10;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum TransferError {
    #[error("instruction {index} ({op}) is not a quadratic number-conserving gate")]
    NonGaussian { index: usize, op: String },
    #[error("instruction {index}: two-qubit gate does not conserve particle number")]
    NotNumberConserving { index: usize },
    #[error("instruction {index}: two-qubit gate acts on non-adjacent qubits")]
    NotAdjacent { index: usize },
}

#[derive(Clone, Debug, Serialize)]
pub struct ModeTransfer {
    #[serde(serialize_with = "serialize_matrix")]
    pub u: CMatrix,
}

fn serialize_matrix<S: serde::Serializer>(m: &CMatrix, s: S) -> Result<S::Ok, S::Error> {
    let rows: Vec<Vec<[f64; 2]>> =
        (0..m.nrows()).map(|r| (0..m.ncols()).map(|k| [m[(r, k)].re, m[(r, k)].im]).collect()).collect();
    rows.serialize(s)
}

impl ModeTransfer {
    pub fn identity(n: usize) -> Self {
        Self { u: CMatrix::identity(n, n) }
    }

    pub fn is_unitary(&self, tol: f64) -> bool {
        let n = self.u.nrows();
        max_abs(&(self.u.adjoint() * &self.u - CMatrix::identity(n, n))) <= tol
    }
}

fn one_mode(n: usize, q: usize, phase: Complex64) -> CMatrix {
    let mut t = CMatrix::identity(n, n);
    t[(q, q)] = phase;
    t
}

/// Transfer block of a two-qubit gate on `(lower, upper)` qubits with matrix
/// index `b(lower) + 2·b(upper)`.
fn two_mode(m: &Matrix4) -> Option<[[Complex64; 2]; 2]> {
    let sectors = [0usize, 1, 1, 2];
    for r in 0..4 {
        for k in 0..4 {
            if sectors[r] != sectors[k] && m[r][k].norm() > TOL {
                return None;
            }
        }
    }
    let m00 = m[0][0];
    if (m00.norm() - 1.0).abs() > TOL {
        return None;
    }
    let t = [[m[1][1] * m00.conj(), m[1][2] * m00.conj()], [m[2][1] * m00.conj(), m[2][2] * m00.conj()]];
    let det = t[0][0] * t[1][1] - t[0][1] * t[1][0];
    ((m[3][3] - m00 * det).norm() <= 1e-9).then_some(t)
}

/// Swaps the roles of the two qubits in a two-qubit matrix.
fn flip_qubits(m: &Matrix4) -> Matrix4 {
    let p = [0usize, 2, 1, 3];
    let mut out = *m;
    for r in 0..4 {
        for k in 0..4 {
            out[p[r]][p[k]] = m[r][k];
        }
    }
    out
}

/// Transfer matrix of a quadratic circuit on `c.n_qubits()` modes.
///
/// Instruction ranges covered by a block are replaced by the block's
/// fermionic permutation.
pub fn mode_transfer(c: &CompiledCircuit) -> Result<ModeTransfer, TransferError> {
    let n = c.n_qubits();
    let mut t = CMatrix::identity(n, n);
    let mut index = 0;
    while index < c.instructions.len() {
        if let Some(b) = c.blocks.iter().filter(|b| b.start == index && b.end > b.start).max_by_key(|b| b.end) {
            let mut step = CMatrix::zeros(n, n);
            let inside: std::collections::HashSet<usize> = b.qubits.iter().copied().collect();
            for q in (0..n).filter(|q| !inside.contains(q)) {
                step[(q, q)] = Complex64::new(1.0, 0.0);
            }
            for (k, &pk) in b.perm.iter().enumerate() {
                step[(b.qubits[pk], b.qubits[k])] = Complex64::new(1.0, 0.0);
            }
            t = step * t;
            index = b.end;
            continue;
        }
        let ins = &c.instructions[index];
        let q = &ins.qubits;
        let i = Complex64::new(0.0, 1.0);
        let step = match &ins.gate {
            Gate::Z => one_mode(n, q[0], Complex64::new(-1.0, 0.0)),
            Gate::S => one_mode(n, q[0], i),
            Gate::Sdg => one_mode(n, q[0], -i),
            Gate::Rz(a) => one_mode(n, q[0], Complex64::from_polar(1.0, a.radians())),
            Gate::Unitary2 { matrix, .. } => {
                if q[0].abs_diff(q[1]) != 1 {
                    return Err(TransferError::NotAdjacent { index });
                }
                let (lo, m) = if q[0] < q[1] { (q[0], *matrix) } else { (q[1], flip_qubits(matrix)) };
                let block = two_mode(&m).ok_or(TransferError::NotNumberConserving { index })?;
                let mut s = CMatrix::identity(n, n);
                for r in 0..2 {
                    for k in 0..2 {
                        s[(lo + r, lo + k)] = block[r][k];
                    }
                }
                s
            }
            g => return Err(TransferError::NonGaussian { index, op: g.opcode().to_string() }),
        };
        t = step * t;
        index += 1;
    }
    Ok(ModeTransfer { u: t })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::jw::tunneling_matrix;

    #[test]
    fn empty_is_identity() {
        let t = mode_transfer(&CompiledCircuit::new(3)).unwrap();
        assert_eq!(t.u, CMatrix::identity(3, 3));
    }

    #[test]
    fn pairing_is_rejected() {
        let mut c = CompiledCircuit::new(2);
        let m = tunneling_matrix(Complex64::new(0.3, 0.0), Complex64::new(0.2, 0.0));
        c.instructions.push(crate::circuit_ir::Instruction::unitary2(0, 1, m, "tunneling"));
        assert!(matches!(mode_transfer(&c), Err(TransferError::NotNumberConserving { index: 0 })));
    }
}
