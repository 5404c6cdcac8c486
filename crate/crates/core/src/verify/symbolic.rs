//! Outcome-parameterized Pauli propagation through Clifford + feedforward circuits.
//!
//! Tracked operators are conjugated gate by gate (`P → U P U†`). Ancillas
//! start in `|0>`; the engine keeps stabilizer generators of the ancilla
//! state so that a measurement can be absorbed: a tracked operator that
//! anticommutes with the measured observable is first multiplied by an
//! anticommuting generator, then the observable is replaced by `(−1)^s`.
//! Signs are affine GF(2) functions of the outcome variables.

use thiserror::Error;

use crate::circuit_ir::{CompiledCircuit, Gate};
use crate::f2core::F2RowVector;
use crate::jw::{PauliAxis, PauliString};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SymbolicError {
    #[error("instruction {0} ({1}) is not Clifford")]
    NonClifford(usize, &'static str),
    #[error("instruction {index}: tracked operator does not survive the measurement of qubit {qubit}")]
    Disturbed { index: usize, qubit: usize },
    #[error("operator acts on {got} qubits, circuit has {want}")]
    SizeMismatch { got: usize, want: usize },
}

/// A Pauli operator whose sign depends linearly on measurement outcomes:
/// `(−1)^{Σ_o sign[o]·s_o} · base`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SymbolicPauli {
    pub base: PauliString,
    pub sign: F2RowVector,
}

impl SymbolicPauli {
    pub fn is_outcome_independent(&self) -> bool {
        self.sign.is_zero()
    }

    /// Variables the sign depends on, numbered in order of measurements and
    /// resets along the circuit.
    pub fn dependent_outcomes(&self) -> Vec<usize> {
        self.sign.support()
    }
}

#[derive(Clone)]
struct Row {
    p: PauliString,
    sign: F2RowVector,
}

impl Row {
    fn mul_right(&mut self, other: &Row) {
        self.p.mul_assign_right(&other.p);
        self.sign.xor_assign(&other.sign);
    }
}

struct Engine {
    rows: Vec<Row>,
    gens: Vec<Row>,
    n_vars: usize,
    n_qubits: usize,
    /// Each outcome variable expressed over the independent variables.
    var_expansion: Vec<F2RowVector>,
}

#[inline]
fn flip(p: &mut PauliString, on: bool) {
    if on {
        p.k = (p.k + 2) & 3;
    }
}

impl Engine {
    fn each(&mut self, mut f: impl FnMut(&mut PauliString)) {
        for r in self.rows.iter_mut().chain(self.gens.iter_mut()) {
            f(&mut r.p);
        }
    }

    fn h(&mut self, q: usize) {
        self.each(|p| {
            let (x, z) = (p.x.get(q), p.z.get(q));
            flip(p, x && z);
            p.x.set(q, z);
            p.z.set(q, x);
        });
    }

    fn s(&mut self, q: usize, dagger: bool) {
        self.each(|p| {
            if p.x.get(q) {
                p.k = (p.k + if dagger { 3 } else { 1 }) & 3;
                p.z.toggle(q);
            }
        });
    }

    fn pauli(&mut self, axis: PauliAxis, q: usize) {
        self.each(|p| {
            let (x, z) = (p.x.get(q), p.z.get(q));
            flip(
                p,
                match axis {
                    PauliAxis::X => z,
                    PauliAxis::Y => x ^ z,
                    PauliAxis::Z => x,
                },
            );
        });
    }

    fn cnot(&mut self, c: usize, t: usize) {
        self.each(|p| {
            if p.x.get(c) {
                p.x.toggle(t);
            }
            if p.z.get(t) {
                p.z.toggle(c);
            }
        });
    }

    fn cz(&mut self, a: usize, b: usize) {
        self.each(|p| {
            let (xa, xb) = (p.x.get(a), p.x.get(b));
            flip(p, xa && xb);
            if xb {
                p.z.toggle(a);
            }
            if xa {
                p.z.toggle(b);
            }
        });
    }

    fn swap(&mut self, a: usize, b: usize) {
        self.each(|p| {
            let (xa, za, xb, zb) = (p.x.get(a), p.z.get(a), p.x.get(b), p.z.get(b));
            p.x.set(a, xb);
            p.z.set(a, zb);
            p.x.set(b, xa);
            p.z.set(b, za);
        });
    }

    /// Conjugation by `exp(−iθR/2)` with `θ = quarter·π/2`.
    fn rotation(&mut self, r: &PauliString, quarter: u8) {
        match quarter & 3 {
            0 => {}
            2 => self.each(|p| flip(p, !p.commutes_with(r))),
            q => {
                // exp(−iθR/2) P exp(iθR/2) = ∓i·R·P for anticommuting P, θ = ±π/2.
                let phase = if q == 1 { 3 } else { 1 };
                self.each(|p| {
                    if !p.commutes_with(r) {
                        let mut out = r.mul(p);
                        out.k = (out.k + phase) & 3;
                        *p = out;
                    }
                });
            }
        }
    }

    fn permute(&mut self, qubits: &[usize], targets: &[usize]) {
        self.each(|p| {
            let saved: Vec<(bool, bool)> = qubits.iter().map(|&q| (p.x.get(q), p.z.get(q))).collect();
            for (&t, (x, z)) in targets.iter().zip(saved) {
                p.x.set(t, x);
                p.z.set(t, z);
            }
        });
    }

    fn fresh_var(&mut self, expansion: Option<F2RowVector>) -> usize {
        let v = self.var_expansion.len();
        let e = expansion.unwrap_or_else(|| F2RowVector::unit(self.n_vars, v));
        self.var_expansion.push(e);
        v
    }

    /// Z-basis measurement of `q`; returns the outcome variable.
    fn measure_z(&mut self, index: usize, q: usize) -> Result<usize, SymbolicError> {
        let pivot = self.gens.iter().position(|g| g.p.x.get(q));
        let var = match pivot {
            Some(pi) => {
                let g0 = self.gens[pi].clone();
                for r in &mut self.rows {
                    if r.p.x.get(q) {
                        r.mul_right(&g0);
                    }
                }
                for (i, g) in self.gens.iter_mut().enumerate() {
                    if i != pi && g.p.x.get(q) {
                        g.mul_right(&g0);
                    }
                }
                let v = self.fresh_var(None);
                let mut zq = PauliString::identity(self.n_qubits);
                zq.z.set(q, true);
                self.gens[pi] = Row { p: zq, sign: self.var_expansion[v].clone() };
                v
            }
            None => {
                if self.rows.iter().any(|r| r.p.x.get(q)) {
                    return Err(SymbolicError::Disturbed { index, qubit: q });
                }
                let n = self.n_qubits;
                let known = self.stabilizer_value_of_z(q);
                let determined = known.is_some();
                let v = self.fresh_var(known);
                if !determined {
                    let mut zq = PauliString::identity(n);
                    zq.z.set(q, true);
                    self.gens.push(Row { p: zq, sign: self.var_expansion[v].clone() });
                }
                v
            }
        };
        let e = self.var_expansion[var].clone();
        for r in &mut self.rows {
            if r.p.z.get(q) {
                r.p.z.set(q, false);
                r.sign.xor_assign(&e);
            }
        }
        // Later pivots must not carry Z_q back into the rows.
        for g in &mut self.gens {
            if g.p.z.get(q) && g.p.weight() > 1 {
                g.p.z.set(q, false);
                g.sign.xor_assign(&e);
            }
        }
        Ok(var)
    }

    /// If `±Z_q` lies in the stabilizer group, its value as an affine
    /// function of the variables (the trailing bit is the constant term).
    fn stabilizer_value_of_z(&self, q: usize) -> Option<F2RowVector> {
        let n = self.n_qubits;
        let has = |p: &PauliString, col: usize| if col % 2 == 0 { p.x.get(col / 2) } else { p.z.get(col / 2) };
        let lead = |p: &PauliString| (0..2 * n).find(|&col| has(p, col));
        // Fully reduced echelon basis of the generators' symplectic vectors.
        let mut basis: Vec<(usize, Row)> = Vec::new();
        for g in &self.gens {
            let mut g = g.clone();
            for (col, b) in &basis {
                if has(&g.p, *col) {
                    g.mul_right(b);
                }
            }
            if let Some(col) = lead(&g.p) {
                for (_, b) in basis.iter_mut() {
                    if has(&b.p, col) {
                        b.mul_right(&g);
                    }
                }
                basis.push((col, g));
            }
        }
        let mut target = Row { p: PauliString::single(n, q, PauliAxis::Z), sign: F2RowVector::zeros(self.n_vars) };
        for (col, b) in &basis {
            if has(&target.p, *col) {
                target.mul_right(b);
            }
        }
        if !target.p.is_identity_letters() {
            return None;
        }
        // Z_q · G = i^k with (−1)^sign·G stabilizing: Z_q = (−1)^{sign + k/2}.
        debug_assert!(target.p.k % 2 == 0);
        let mut sign = target.sign;
        if target.p.k == 2 {
            sign.toggle(self.n_vars - 1);
        }
        Some(sign)
    }

    fn cond_pauli(&mut self, axis: PauliAxis, q: usize, outcomes: &[usize], parity: u8) {
        let mut poly = F2RowVector::zeros(self.n_vars);
        for &o in outcomes {
            poly.xor_assign(&self.var_expansion[o]);
        }
        let constant = parity == 0;
        for r in self.rows.iter_mut().chain(self.gens.iter_mut()) {
            let (x, z) = (r.p.x.get(q), r.p.z.get(q));
            let anti = match axis {
                PauliAxis::X => z,
                PauliAxis::Y => x ^ z,
                PauliAxis::Z => x,
            };
            if anti {
                // Applied iff Σs ⊕ parity = 0, i.e. flip by 1 ⊕ parity ⊕ Σs.
                r.sign.xor_assign(&poly);
                flip(&mut r.p, constant);
            }
        }
    }
}

/// Pushes each operator through `c`. Operators act on all `c.n_qubits()` qubits.
pub fn propagate(c: &CompiledCircuit, inputs: &[PauliString]) -> Result<Vec<SymbolicPauli>, SymbolicError> {
    let nq = c.n_qubits();
    if let Some(p) = inputs.iter().find(|p| p.n() != nq) {
        return Err(SymbolicError::SizeMismatch { got: p.n(), want: nq });
    }
    let n_outcome_ids = c.instructions.iter().filter_map(|i| i.outcome).map(|o| o as usize + 1).max().unwrap_or(0);
    let hidden = c.count(|g| matches!(g, Gate::Reset | Gate::PrepPlus));
    let n_measure = c.count(Gate::is_measurement);
    // Variables: one per measurement or reset, plus a trailing constant marker.
    let n_vars = n_measure + hidden + 1;
    let mut e = Engine {
        rows: inputs.iter().map(|p| Row { p: p.clone(), sign: F2RowVector::zeros(n_vars) }).collect(),
        gens: (c.n_system..nq)
            .map(|q| Row { p: PauliString::single(nq, q, PauliAxis::Z), sign: F2RowVector::zeros(n_vars) })
            .collect(),
        n_vars,
        n_qubits: nq,
        var_expansion: Vec::new(),
    };
    let mut outcome_var: Vec<Option<usize>> = vec![None; n_outcome_ids];
    for (index, ins) in c.instructions.iter().enumerate() {
        let q = &ins.qubits;
        match &ins.gate {
            Gate::Cnot => e.cnot(q[0], q[1]),
            Gate::Cz => e.cz(q[0], q[1]),
            Gate::Swap => e.swap(q[0], q[1]),
            Gate::H => e.h(q[0]),
            Gate::S => e.s(q[0], false),
            Gate::Sdg => e.s(q[0], true),
            Gate::X => e.pauli(PauliAxis::X, q[0]),
            Gate::Y => e.pauli(PauliAxis::Y, q[0]),
            Gate::Z => e.pauli(PauliAxis::Z, q[0]),
            Gate::Rz(a) | Gate::Rzz(a) | Gate::Rxx(a) => {
                let quarter = a.quarter_turns().ok_or(SymbolicError::NonClifford(index, ins.gate.opcode()))?;
                let axis = if matches!(ins.gate, Gate::Rxx(_)) { PauliAxis::X } else { PauliAxis::Z };
                let mut r = PauliString::identity(nq);
                for &qq in q {
                    r.set_letter(qq, Some(axis));
                }
                e.rotation(&r, quarter);
            }
            Gate::Unitary2 { .. } => return Err(SymbolicError::NonClifford(index, "unitary2")),
            Gate::MeasureZ => {
                let v = e.measure_z(index, q[0])?;
                outcome_var[ins.outcome.expect("validated") as usize] = Some(v);
            }
            Gate::MeasureX => {
                e.h(q[0]);
                let v = e.measure_z(index, q[0])?;
                e.h(q[0]);
                outcome_var[ins.outcome.expect("validated") as usize] = Some(v);
            }
            Gate::Reset | Gate::PrepPlus => {
                let v = e.measure_z(index, q[0])?;
                e.cond_pauli(PauliAxis::X, q[0], &[v], 1);
                if matches!(ins.gate, Gate::PrepPlus) {
                    e.h(q[0]);
                }
            }
            Gate::CondPauli(axis) => {
                let cond = ins.cond.as_ref().expect("validated");
                let vars: Vec<usize> =
                    cond.outcomes.iter().map(|&o| outcome_var[o as usize].expect("validated order")).collect();
                e.cond_pauli(*axis, q[0], &vars, cond.parity);
            }
            Gate::Permute { targets } => e.permute(q, targets),
        }
    }
    let const_bit = n_vars - 1;
    Ok(e
        .rows
        .into_iter()
        .map(|mut r| {
            if r.sign.get(const_bit) {
                r.sign.set(const_bit, false);
                r.p.negate();
            }
            SymbolicPauli { base: r.p, sign: r.sign }
        })
        .collect())
}

/// Conjugates a single operator through `c`.
pub fn pauli_conjugate(c: &CompiledCircuit, p: &PauliString) -> Result<SymbolicPauli, SymbolicError> {
    Ok(propagate(c, std::slice::from_ref(p))?.remove(0))
}
