//! CZ circuits `C_Z(½(B + Bᵀ))` through an ancilla register: each nonzero
//! row of `B` is copied onto an ancilla as a parity of system bits, coupled
//! back by one CZ, then measured in the X basis with Z feedforward.

use serde::{Deserialize, Serialize};

use super::PermError;
use crate::circuit_ir::{CircuitBuilder, CompiledCircuit};
use crate::f2core::{min_weight_row_solve, F2Matrix, F2RowVector};
use crate::jw::PauliAxis;

/// A CNOT source feeding an ancilla row.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Source {
    System(usize),
    Ancilla(usize),
}

/// Rows to build, in order; each row XORs its sources into a fresh ancilla.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct RowPlan {
    pub n: usize,
    pub rows: Vec<(usize, Vec<Source>)>,
}

impl RowPlan {
    pub fn cnot_count(&self) -> usize {
        self.rows.iter().map(|(_, s)| s.len()).sum()
    }

    /// The system parity held by every planned ancilla.
    pub fn parities(&self) -> Vec<(usize, F2RowVector)> {
        let mut built: Vec<(usize, F2RowVector)> = Vec::with_capacity(self.rows.len());
        for (a, sources) in &self.rows {
            let mut v = F2RowVector::zeros(self.n);
            for s in sources {
                match *s {
                    Source::System(j) => v.toggle(j),
                    Source::Ancilla(r) => {
                        let (_, w) = built.iter().find(|(k, _)| *k == r).expect("ancilla rows are built before use");
                        v.xor_assign(w);
                    }
                }
            }
            built.push((*a, v));
        }
        built
    }

    /// The strictly lower part of the realized matrix, one row per system mode.
    pub fn matrix(&self) -> F2Matrix {
        let mut m = F2Matrix::zeros(self.n, self.n);
        for (a, v) in self.parities() {
            for j in v.iter_ones() {
                m.set(a, j, true);
            }
        }
        m
    }
}

/// Greedy row-by-row plan: row `a` is a minimum-weight combination of system
/// unit rows and the ancilla rows already built.
///
/// The diagonal of `b` is ignored. Columns outside `relevant_columns` carry
/// inputs known to be zero and are left unconstrained.
pub fn plan_rows(b: &F2Matrix, relevant_columns: &[usize], exact_threshold: usize) -> Result<RowPlan, PermError> {
    let n = b.rows();
    if b.cols() != n {
        return Err(PermError::SizeMismatch { got: b.cols(), want: n });
    }
    let mut built: Vec<(usize, F2RowVector)> = Vec::new();
    let mut plan = RowPlan { n, rows: Vec::new() };
    for a in 0..n {
        let mut target = b.row(a).clone();
        target.set(a, false);
        let target = target.select(relevant_columns);
        if target.is_zero() {
            continue;
        }
        let mut rows: Vec<F2RowVector> = (0..n).map(|j| F2RowVector::unit(n, j)).collect();
        rows.extend(built.iter().map(|(_, v)| v.clone()));
        let pc = F2Matrix::from_rows(rows, n)?;
        let x = min_weight_row_solve(&pc, &target, relevant_columns, exact_threshold)?;
        let mut value = F2RowVector::zeros(n);
        let sources: Vec<Source> = x
            .iter_ones()
            .map(|r| {
                value.xor_assign(pc.row(r));
                if r < n {
                    Source::System(r)
                } else {
                    Source::Ancilla(built[r - n].0)
                }
            })
            .collect();
        built.push((a, value));
        plan.rows.push((a, sources));
    }
    Ok(plan)
}

/// Plan for `B = L`: row `a` is row `a-1` plus system mode `a-1`.
pub fn reflection_1d_plan(n: usize) -> RowPlan {
    let rows = (1..n)
        .map(|a| {
            let mut s = vec![Source::System(a - 1)];
            if a >= 2 {
                s.push(Source::Ancilla(a - 1));
            }
            (a, s)
        })
        .collect();
    RowPlan { n, rows }
}

/// Plan for `B = L_x ⊗ L_y` with row index `x·ny + y`: the two-dimensional
/// prefix sum `S(x,y) = e(x-1,y-1) + S(x-1,y) + S(x,y-1) + S(x-1,y-1)`.
pub fn reflection_2d_plan(nx: usize, ny: usize) -> RowPlan {
    let idx = |x: usize, y: usize| x * ny + y;
    let mut rows = Vec::new();
    for x in 1..nx {
        for y in 1..ny {
            let mut s = vec![Source::System(idx(x - 1, y - 1))];
            if x >= 2 {
                s.push(Source::Ancilla(idx(x - 1, y)));
            }
            if y >= 2 {
                s.push(Source::Ancilla(idx(x, y - 1)));
            }
            if x >= 2 && y >= 2 {
                s.push(Source::Ancilla(idx(x - 1, y - 1)));
            }
            rows.push((idx(x, y), s));
        }
    }
    RowPlan { n: nx * ny, rows }
}

/// Emits the phase `(-1)^{Σ_a x_a·row_a(x)}` with `sys[a]` holding row index `a`.
pub fn emit_ancilla_cz(b: &mut CircuitBuilder, sys: &[usize], plan: &RowPlan) {
    assert_eq!(sys.len(), plan.n);
    if plan.rows.is_empty() {
        return;
    }
    let prev = b.set_pass("ancilla_cz");
    let mut anc = vec![usize::MAX; plan.n];
    for (a, _) in &plan.rows {
        anc[*a] = b.alloc_ancilla();
    }
    for (a, sources) in &plan.rows {
        for s in sources {
            let src = match *s {
                Source::System(j) => sys[j],
                Source::Ancilla(r) => anc[r],
            };
            b.cnot(src, anc[*a]);
        }
    }
    for (a, _) in &plan.rows {
        b.cz(sys[*a], anc[*a]);
    }
    let parities = plan.parities();
    let outcomes: Vec<u32> = plan.rows.iter().map(|(a, _)| b.measure_x(anc[*a])).collect();
    for (j, &q) in sys.iter().enumerate() {
        let cond: Vec<u32> = parities.iter().zip(&outcomes).filter(|((_, v), _)| v.get(j)).map(|(_, &s)| s).collect();
        if !cond.is_empty() {
            b.cond_pauli(PauliAxis::Z, q, cond, 1);
        }
    }
    for (a, _) in &plan.rows {
        b.release(anc[*a]);
    }
    b.set_pass(&prev);
}

/// `C_Z(½(B + Bᵀ))` on `b.rows()` system qubits via the row-plan search.
pub fn synth_via_ancilla_cz(b: &F2Matrix, relevant_columns: &[usize]) -> Result<CompiledCircuit, PermError> {
    synth_via_ancilla_cz_with(b, relevant_columns, super::DEFAULT_EXACT_THRESHOLD)
}

pub fn synth_via_ancilla_cz_with(
    b: &F2Matrix,
    relevant_columns: &[usize],
    exact_threshold: usize,
) -> Result<CompiledCircuit, PermError> {
    let plan = plan_rows(b, relevant_columns, exact_threshold)?;
    let mut builder = CircuitBuilder::new(b.rows());
    let sys: Vec<usize> = (0..b.rows()).collect();
    emit_ancilla_cz(&mut builder, &sys, &plan);
    Ok(builder.finish())
}
