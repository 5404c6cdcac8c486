//! Fermionic input circuits and compiled qubit circuits.
//!
//! A compiled circuit is a flat instruction list over `n_system + n_ancilla`
//! qubits. Qubit relabelings are explicit `Permute` instructions that cost
//! nothing; measurement outcomes are numbered in program order and feed
//! parity-conditioned Paulis.

use std::collections::HashSet;
use std::f64::consts::PI;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use serde_json::Value;
use thiserror::Error;

use crate::jw::PauliAxis;

pub type Matrix4 = [[Complex64; 4]; 4];

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum IrError {
    #[error("instruction {index}: {msg}")]
    Invalid { index: usize, msg: String },
    #[error("malformed circuit JSON: {0}")]
    Malformed(String),
    #[error("unknown opcode `{0}`")]
    UnknownOp(String),
    #[error("instruction {index} references outcome {outcome} before it is recorded")]
    DanglingOutcome { index: usize, outcome: u32 },
}

// ---------------------------------------------------------------- fermionic

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub enum GateKind {
    /// `exp[−i(α c_i†c_j + β c_i†c_j† + h.c.)]`
    Tunneling { alpha: Complex64, beta: Complex64 },
    /// `exp[−i(γ n_i n_j + δ_i n_i + δ_j n_j)]`
    Interaction { gamma: f64, delta_i: f64, delta_j: f64 },
    /// `exp(−i J dt χ_a χ_b χ_c χ_d)` on four Majorana indices.
    MajoranaQuartic { coupling: f64, dt: f64 },
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FermionicGate {
    pub kind: GateKind,
    pub modes: Vec<usize>,
}

impl FermionicGate {
    pub fn tunneling(i: usize, j: usize, alpha: Complex64, beta: Complex64) -> Self {
        Self { kind: GateKind::Tunneling { alpha, beta }, modes: vec![i, j] }
    }

    pub fn interaction(i: usize, j: usize, gamma: f64, delta_i: f64, delta_j: f64) -> Self {
        Self { kind: GateKind::Interaction { gamma, delta_i, delta_j }, modes: vec![i, j] }
    }

    pub fn quartic(majoranas: [usize; 4], coupling: f64, dt: f64) -> Self {
        Self { kind: GateKind::MajoranaQuartic { coupling, dt }, modes: majoranas.to_vec() }
    }
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct FermionicCircuit {
    pub n_modes: usize,
    pub layers: Vec<Vec<FermionicGate>>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Violation {
    pub layer: usize,
    pub gate: usize,
    pub mode: Option<usize>,
    pub reason: String,
}

impl FermionicCircuit {
    pub fn new(n_modes: usize) -> Self {
        Self { n_modes, layers: Vec::new() }
    }

    pub fn depth(&self) -> usize {
        self.layers.len()
    }

    /// Index bounds, distinctness, and the per-layer cap of one tunneling
    /// and one interaction per mode.
    pub fn validate(&self) -> Vec<Violation> {
        let mut out = Vec::new();
        for (l, layer) in self.layers.iter().enumerate() {
            let mut tunnel = vec![false; self.n_modes];
            let mut inter = vec![false; self.n_modes];
            let mut quartic = vec![false; 2 * self.n_modes];
            for (g, gate) in layer.iter().enumerate() {
                let (arity, bound) = match gate.kind {
                    GateKind::MajoranaQuartic { .. } => (4, 2 * self.n_modes),
                    _ => (2, self.n_modes),
                };
                let mut push = |mode: Option<usize>, reason: String| {
                    out.push(Violation { layer: l, gate: g, mode, reason })
                };
                if gate.modes.len() != arity {
                    push(None, format!("expected {arity} indices, got {}", gate.modes.len()));
                    continue;
                }
                if let Some(&m) = gate.modes.iter().find(|&&m| m >= bound) {
                    push(Some(m), format!("index {m} out of range"));
                    continue;
                }
                let distinct: HashSet<_> = gate.modes.iter().collect();
                if distinct.len() != arity {
                    push(None, "repeated index".into());
                    continue;
                }
                let used = match gate.kind {
                    GateKind::Tunneling { .. } => &mut tunnel,
                    GateKind::Interaction { .. } => &mut inter,
                    GateKind::MajoranaQuartic { .. } => &mut quartic,
                };
                for &m in &gate.modes {
                    if std::mem::replace(&mut used[m], true) {
                        out.push(Violation {
                            layer: l,
                            gate: g,
                            mode: Some(m),
                            reason: format!("mode {m} used by two gates of the same kind in one layer"),
                        });
                    }
                }
            }
        }
        out
    }
}

// ---------------------------------------------------------------- qubit IR

/// Rotation angle: an exact multiple `num/den` of a full turn, or radians.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Angle {
    Turns { num: i64, den: u64 },
    Radians(f64),
}

impl Angle {
    /// `2π·num/den`, reduced with `num` taken mod `den`.
    pub fn turns(num: i64, den: u64) -> Self {
        assert!(den > 0, "zero denominator");
        let d = den as i64;
        let num = num.rem_euclid(d);
        let g = gcd(num.unsigned_abs(), den).max(1);
        Angle::Turns { num: num / g as i64, den: den / g }
    }

    pub fn radians(&self) -> f64 {
        match *self {
            Angle::Turns { num, den } => 2.0 * PI * num as f64 / den as f64,
            Angle::Radians(r) => r,
        }
    }

    pub fn neg(&self) -> Self {
        match *self {
            Angle::Turns { num, den } => Angle::turns(-num, den),
            Angle::Radians(r) => Angle::Radians(-r),
        }
    }

    /// Number of quarter turns if the angle is a multiple of π/2.
    pub fn quarter_turns(&self) -> Option<u8> {
        match *self {
            Angle::Turns { num, den } => {
                let four = 4 * num;
                (four % den as i64 == 0).then(|| (four / den as i64).rem_euclid(4) as u8)
            }
            Angle::Radians(r) => {
                let k = r / (PI / 2.0);
                ((k - k.round()).abs() < 1e-12).then(|| (k.round() as i64).rem_euclid(4) as u8)
            }
        }
    }

    pub fn is_dyadic(&self) -> bool {
        matches!(*self, Angle::Turns { den, .. } if den.is_power_of_two())
    }
}

fn gcd(mut a: u64, mut b: u64) -> u64 {
    while b != 0 {
        (a, b) = (b, a % b);
    }
    a
}

#[derive(Clone, Debug, PartialEq)]
pub enum Gate {
    Cnot,
    Cz,
    Swap,
    H,
    S,
    Sdg,
    X,
    Y,
    Z,
    /// `exp(−iθZ/2)`
    Rz(Angle),
    /// `exp(−iθ Z⊗Z/2)`
    Rzz(Angle),
    /// `exp(−iθ X⊗X/2)`
    Rxx(Angle),
    /// Matrix index is `b(q0) + 2·b(q1)`.
    Unitary2 { matrix: Matrix4, label: String },
    MeasureZ,
    MeasureX,
    /// Reset to `|0>`.
    Reset,
    /// Reset to `|+>`.
    PrepPlus,
    /// Pauli applied when the parity of the listed outcomes equals the condition parity.
    CondPauli(PauliAxis),
    /// Content of `qubits[k]` moves to `targets[k]`; free relabeling.
    Permute { targets: Vec<usize> },
}

impl Gate {
    pub fn opcode(&self) -> &'static str {
        match self {
            Gate::Cnot => "cnot",
            Gate::Cz => "cz",
            Gate::Swap => "swap",
            Gate::H => "h",
            Gate::S => "s",
            Gate::Sdg => "sdg",
            Gate::X => "x",
            Gate::Y => "y",
            Gate::Z => "z",
            Gate::Rz(_) => "rz",
            Gate::Rzz(_) => "rzz",
            Gate::Rxx(_) => "rxx",
            Gate::Unitary2 { .. } => "unitary2",
            Gate::MeasureZ => "measure_z",
            Gate::MeasureX => "measure_x",
            Gate::Reset => "reset",
            Gate::PrepPlus => "prep_plus",
            Gate::CondPauli(PauliAxis::X) => "cond_x",
            Gate::CondPauli(PauliAxis::Y) => "cond_y",
            Gate::CondPauli(PauliAxis::Z) => "cond_z",
            Gate::Permute { .. } => "permute",
        }
    }

    pub fn arity(&self) -> Option<usize> {
        match self {
            Gate::Cnot | Gate::Cz | Gate::Swap | Gate::Rzz(_) | Gate::Rxx(_) | Gate::Unitary2 { .. } => Some(2),
            Gate::Permute { targets } => Some(targets.len()),
            _ => Some(1),
        }
    }

    pub fn is_measurement(&self) -> bool {
        matches!(self, Gate::MeasureZ | Gate::MeasureX)
    }

    pub fn is_unitary_gate(&self) -> bool {
        !matches!(
            self,
            Gate::MeasureZ | Gate::MeasureX | Gate::Reset | Gate::PrepPlus | Gate::CondPauli(_) | Gate::Permute { .. }
        )
    }

    pub fn is_clifford(&self) -> bool {
        match self {
            Gate::Rz(a) | Gate::Rzz(a) | Gate::Rxx(a) => a.quarter_turns().is_some(),
            Gate::Unitary2 { .. } => false,
            _ => true,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Condition {
    pub outcomes: Vec<u32>,
    pub parity: u8,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Instruction {
    pub gate: Gate,
    pub qubits: Vec<usize>,
    pub outcome: Option<u32>,
    pub cond: Option<Condition>,
    pub layer: u32,
    pub pass: String,
}

impl Instruction {
    pub fn new(gate: Gate, qubits: Vec<usize>) -> Self {
        Self { gate, qubits, outcome: None, cond: None, layer: 0, pass: String::new() }
    }

    pub fn unitary2(q0: usize, q1: usize, matrix: Matrix4, label: &str) -> Self {
        Self::new(Gate::Unitary2 { matrix, label: label.to_string() }, vec![q0, q1])
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Block {
    /// Instruction range `[start, end)`.
    pub start: usize,
    pub end: usize,
    /// Register positions in qubit order.
    pub qubits: Vec<usize>,
    /// Fermionic permutation on register positions realized by the range.
    pub perm: Vec<usize>,
}

#[derive(Clone, Debug, Default, PartialEq)]
pub struct CompiledCircuit {
    pub n_system: usize,
    pub n_ancilla: usize,
    pub instructions: Vec<Instruction>,
    pub blocks: Vec<Block>,
    pub meta: Option<Value>,
}

impl CompiledCircuit {
    pub fn new(n_system: usize) -> Self {
        Self { n_system, ..Default::default() }
    }

    pub fn n_qubits(&self) -> usize {
        self.n_system + self.n_ancilla
    }

    pub fn len(&self) -> usize {
        self.instructions.len()
    }

    pub fn is_empty(&self) -> bool {
        self.instructions.is_empty()
    }

    pub fn outcome_count(&self) -> usize {
        self.instructions.iter().filter(|i| i.outcome.is_some()).count()
    }

    pub fn count(&self, pred: impl Fn(&Gate) -> bool) -> usize {
        self.instructions.iter().filter(|i| pred(&i.gate)).count()
    }

    /// Structural checks; see [`IrError`].
    pub fn validate(&self) -> Result<(), IrError> {
        let nq = self.n_qubits();
        let mut recorded: HashSet<u32> = HashSet::new();
        let mut measured = vec![false; nq];
        let mut last_layer = 0;
        for (index, ins) in self.instructions.iter().enumerate() {
            let bad = |msg: String| IrError::Invalid { index, msg };
            if ins.layer < last_layer {
                return Err(bad(format!("layer tag {} after {}", ins.layer, last_layer)));
            }
            last_layer = ins.layer;
            if ins.gate.arity() != Some(ins.qubits.len()) {
                return Err(bad(format!("{} on {} qubits", ins.gate.opcode(), ins.qubits.len())));
            }
            if let Some(&q) = ins.qubits.iter().find(|&&q| q >= nq) {
                return Err(bad(format!("qubit {q} out of range for {nq} qubits")));
            }
            let distinct: HashSet<_> = ins.qubits.iter().collect();
            if distinct.len() != ins.qubits.len() {
                return Err(bad("repeated qubit".into()));
            }
            match &ins.gate {
                Gate::Unitary2 { matrix, .. } => {
                    if !is_unitary4(matrix, 1e-12) {
                        return Err(bad("two-qubit matrix is not unitary".into()));
                    }
                }
                Gate::Permute { targets } => {
                    let src: HashSet<_> = ins.qubits.iter().collect();
                    let dst: HashSet<_> = targets.iter().collect();
                    if src != dst || dst.len() != targets.len() {
                        return Err(bad("permute targets are not a rearrangement of its qubits".into()));
                    }
                }
                Gate::CondPauli(_) => {
                    let cond = ins.cond.as_ref().ok_or_else(|| bad("conditioned Pauli without condition".into()))?;
                    if cond.parity > 1 {
                        return Err(bad("parity must be 0 or 1".into()));
                    }
                    if let Some(&o) = cond.outcomes.iter().find(|o| !recorded.contains(o)) {
                        return Err(IrError::DanglingOutcome { index, outcome: o });
                    }
                }
                _ => {}
            }
            if ins.cond.is_some() && !matches!(ins.gate, Gate::CondPauli(_)) {
                return Err(bad("only Paulis may be classically conditioned".into()));
            }
            if ins.gate.is_measurement() {
                let o = ins.outcome.ok_or_else(|| bad("measurement without outcome id".into()))?;
                if !recorded.insert(o) {
                    return Err(bad(format!("outcome id {o} reused")));
                }
            } else if ins.outcome.is_some() {
                return Err(bad("outcome id on a non-measurement".into()));
            }
            // A measured qubit must be reset before it carries new gates.
            match &ins.gate {
                Gate::Permute { targets } => {
                    let moved: Vec<bool> = ins.qubits.iter().map(|&q| measured[q]).collect();
                    for (t, m) in targets.iter().zip(moved) {
                        measured[*t] = m;
                    }
                }
                Gate::Reset | Gate::PrepPlus => measured[ins.qubits[0]] = false,
                Gate::CondPauli(_) => {}
                g if g.is_measurement() => measured[ins.qubits[0]] = true,
                _ => {
                    if let Some(&q) = ins.qubits.iter().find(|&&q| measured[q]) {
                        return Err(bad(format!("qubit {q} reused after measurement without reset")));
                    }
                }
            }
        }
        for b in &self.blocks {
            if b.start > b.end || b.end > self.instructions.len() || b.qubits.len() != b.perm.len() {
                return Err(IrError::Malformed(format!("bad block {}..{}", b.start, b.end)));
            }
        }
        Ok(())
    }

    /// Concatenation; outcome ids of `other` are shifted past ours.
    pub fn concat(&self, other: &CompiledCircuit) -> CompiledCircuit {
        assert_eq!(self.n_system, other.n_system, "system registers differ");
        let shift = self.instructions.iter().filter_map(|i| i.outcome).map(|o| o + 1).max().unwrap_or(0);
        let base_layer = self.instructions.last().map_or(0, |i| i.layer + 1);
        let offset = self.instructions.len();
        let mut out = self.clone();
        out.n_ancilla = self.n_ancilla.max(other.n_ancilla);
        out.instructions.extend(other.instructions.iter().map(|i| {
            let mut i = i.clone();
            i.outcome = i.outcome.map(|o| o + shift);
            if let Some(c) = &mut i.cond {
                c.outcomes.iter_mut().for_each(|o| *o += shift);
            }
            i.layer += base_layer;
            i
        }));
        out.blocks.extend(other.blocks.iter().map(|b| Block { start: b.start + offset, end: b.end + offset, ..b.clone() }));
        out
    }

    /// Replaces every free relabeling with explicit SWAP gates.
    pub fn materialize_swaps(&self) -> CompiledCircuit {
        let mut out = self.clone();
        out.instructions.clear();
        out.blocks.clear();
        for ins in &self.instructions {
            let Gate::Permute { targets } = &ins.gate else {
                out.instructions.push(ins.clone());
                continue;
            };
            // Swapping the cycle head with each successive member moves
            // every content one step along the cycle.
            let dest: std::collections::HashMap<usize, usize> =
                ins.qubits.iter().copied().zip(targets.iter().copied()).collect();
            let mut done: HashSet<usize> = HashSet::new();
            for &start in &ins.qubits {
                if done.contains(&start) {
                    continue;
                }
                let mut cycle = vec![start];
                let mut q = dest[&start];
                while q != start {
                    cycle.push(q);
                    q = dest[&q];
                }
                done.extend(cycle.iter().copied());
                for &member in cycle.iter().skip(1) {
                    let mut s = Instruction::new(Gate::Swap, vec![start, member]);
                    s.layer = ins.layer;
                    s.pass = "materialized-relabel".into();
                    out.instructions.push(s);
                }
            }
        }
        out
    }
}

pub fn is_unitary4(m: &Matrix4, tol: f64) -> bool {
    for i in 0..4 {
        for j in 0..4 {
            let dot: Complex64 = (0..4).map(|k| m[k][i].conj() * m[k][j]).sum();
            let want = if i == j { 1.0 } else { 0.0 };
            if (dot - want).norm() > tol {
                return false;
            }
        }
    }
    true
}

// ---------------------------------------------------------------- builder

/// Single-owner circuit construction with an ancilla pool.
#[derive(Clone, Debug)]
pub struct CircuitBuilder {
    circuit: CompiledCircuit,
    next_outcome: u32,
    free: Vec<usize>,
    /// Releases withheld from the pool while parallel blocks are emitted.
    held: Option<Vec<usize>>,
    pass: String,
    layer: u32,
}

impl CircuitBuilder {
    pub fn new(n_system: usize) -> Self {
        Self {
            circuit: CompiledCircuit::new(n_system),
            next_outcome: 0,
            free: Vec::new(),
            held: None,
            pass: String::new(),
            layer: 0,
        }
    }

    pub fn n_system(&self) -> usize {
        self.circuit.n_system
    }

    pub fn n_qubits(&self) -> usize {
        self.circuit.n_qubits()
    }

    pub fn len(&self) -> usize {
        self.circuit.instructions.len()
    }

    pub fn is_empty(&self) -> bool {
        self.circuit.instructions.is_empty()
    }

    pub fn instructions(&self) -> &[Instruction] {
        &self.circuit.instructions
    }

    pub fn set_pass(&mut self, pass: &str) -> String {
        std::mem::replace(&mut self.pass, pass.to_string())
    }

    pub fn next_layer(&mut self) {
        self.layer += 1;
    }

    pub fn push(&mut self, mut ins: Instruction) {
        ins.layer = self.layer;
        if ins.pass.is_empty() {
            ins.pass.clone_from(&self.pass);
        }
        self.circuit.instructions.push(ins);
    }

    fn gate(&mut self, gate: Gate, qubits: Vec<usize>) {
        self.push(Instruction::new(gate, qubits));
    }

    pub fn cnot(&mut self, c: usize, t: usize) {
        self.gate(Gate::Cnot, vec![c, t]);
    }

    pub fn cz(&mut self, a: usize, b: usize) {
        self.gate(Gate::Cz, vec![a, b]);
    }

    pub fn swap(&mut self, a: usize, b: usize) {
        self.gate(Gate::Swap, vec![a, b]);
    }

    pub fn h(&mut self, q: usize) {
        self.gate(Gate::H, vec![q]);
    }

    pub fn s(&mut self, q: usize) {
        self.gate(Gate::S, vec![q]);
    }

    pub fn sdg(&mut self, q: usize) {
        self.gate(Gate::Sdg, vec![q]);
    }

    pub fn pauli(&mut self, axis: PauliAxis, q: usize) {
        let g = match axis {
            PauliAxis::X => Gate::X,
            PauliAxis::Y => Gate::Y,
            PauliAxis::Z => Gate::Z,
        };
        self.gate(g, vec![q]);
    }

    pub fn rz(&mut self, q: usize, a: Angle) {
        self.gate(Gate::Rz(a), vec![q]);
    }

    pub fn rzz(&mut self, a: usize, b: usize, angle: Angle) {
        self.gate(Gate::Rzz(angle), vec![a, b]);
    }

    pub fn rxx(&mut self, a: usize, b: usize, angle: Angle) {
        self.gate(Gate::Rxx(angle), vec![a, b]);
    }

    pub fn unitary2(&mut self, q0: usize, q1: usize, matrix: Matrix4, label: &str) {
        self.push(Instruction::unitary2(q0, q1, matrix, label));
    }

    fn measure(&mut self, gate: Gate, q: usize) -> u32 {
        let o = self.next_outcome;
        self.next_outcome += 1;
        let mut ins = Instruction::new(gate, vec![q]);
        ins.outcome = Some(o);
        self.push(ins);
        o
    }

    pub fn measure_z(&mut self, q: usize) -> u32 {
        self.measure(Gate::MeasureZ, q)
    }

    pub fn measure_x(&mut self, q: usize) -> u32 {
        self.measure(Gate::MeasureX, q)
    }

    pub fn reset(&mut self, q: usize) {
        self.gate(Gate::Reset, vec![q]);
    }

    /// Pauli on `q` applied iff the outcomes' parity equals `parity`. An
    /// empty outcome set with parity 0 is an unconditional Pauli.
    pub fn cond_pauli(&mut self, axis: PauliAxis, q: usize, outcomes: Vec<u32>, parity: u8) {
        if outcomes.is_empty() {
            if parity == 0 {
                self.pauli(axis, q);
            }
            return;
        }
        let mut ins = Instruction::new(Gate::CondPauli(axis), vec![q]);
        ins.cond = Some(Condition { outcomes, parity });
        self.push(ins);
    }

    /// Moves the content of `qubits[k]` to `targets[k]`; identity moves are dropped.
    pub fn permute(&mut self, qubits: &[usize], targets: &[usize]) {
        assert_eq!(qubits.len(), targets.len());
        let (q, t): (Vec<usize>, Vec<usize>) =
            qubits.iter().zip(targets).filter(|(a, b)| a != b).map(|(a, b)| (*a, *b)).unzip();
        if !q.is_empty() {
            self.gate(Gate::Permute { targets: t }, q);
        }
    }

    /// Fresh ancilla in `|0>`, reusing a measured one when available.
    pub fn alloc_ancilla(&mut self) -> usize {
        if let Some(q) = self.free.pop() {
            self.reset(q);
            q
        } else {
            let q = self.circuit.n_qubits();
            self.circuit.n_ancilla += 1;
            q
        }
    }

    /// Fresh ancilla in `|+>`.
    pub fn alloc_plus_ancilla(&mut self) -> usize {
        let q = self.free.pop().unwrap_or_else(|| {
            let q = self.circuit.n_qubits();
            self.circuit.n_ancilla += 1;
            q
        });
        self.gate(Gate::PrepPlus, vec![q]);
        q
    }

    /// Returns a measured ancilla to the pool.
    pub fn release(&mut self, q: usize) {
        debug_assert!(q >= self.circuit.n_system);
        match &mut self.held {
            Some(h) => h.push(q),
            None => self.free.push(q),
        }
    }

    /// Until [`Self::end_parallel`], released ancillas are not reused, so
    /// blocks on disjoint qubits do not serialize through shared ancillas.
    /// Returns whether this call opened the section.
    pub fn begin_parallel(&mut self) -> bool {
        if self.held.is_some() {
            return false;
        }
        self.held = Some(Vec::new());
        true
    }

    pub fn end_parallel(&mut self, opened: bool) {
        if opened {
            if let Some(h) = self.held.take() {
                self.free.extend(h);
            }
        }
    }

    pub fn add_block(&mut self, start: usize, qubits: Vec<usize>, perm: Vec<usize>) {
        let end = self.len();
        self.circuit.blocks.push(Block { start, end, qubits, perm });
    }

    pub fn finish(self) -> CompiledCircuit {
        self.circuit
    }
}

// ---------------------------------------------------------------- metrics

/// How a depth count treats measurements.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum DepthModel {
    /// Measurements and feedforward are free; only unitary gates cost a layer.
    Clifford,
    /// Measurements also cost one layer.
    WithMeasurements,
}

/// As-soon-as-possible layering over qubit and classical dependencies.
/// Conditioned Paulis, resets and relabelings cost no layer but still order
/// later operations on their qubits.
pub fn depth_with(c: &CompiledCircuit, model: DepthModel) -> usize {
    let nq = c.n_qubits();
    let mut ready = vec![0usize; nq];
    let mut outcome_ready: std::collections::HashMap<u32, usize> = std::collections::HashMap::new();
    let mut depth = 0;
    for ins in &c.instructions {
        if let Gate::Permute { targets } = &ins.gate {
            let moved: Vec<usize> = ins.qubits.iter().map(|&q| ready[q]).collect();
            for (t, r) in targets.iter().zip(moved) {
                ready[*t] = r;
            }
            continue;
        }
        let mut start = ins.qubits.iter().map(|&q| ready[q]).max().unwrap_or(0);
        if let Some(cond) = &ins.cond {
            start = cond.outcomes.iter().map(|o| outcome_ready.get(o).copied().unwrap_or(0)).fold(start, usize::max);
        }
        let cost = match &ins.gate {
            g if g.is_unitary_gate() => 1,
            g if g.is_measurement() => usize::from(model == DepthModel::WithMeasurements),
            _ => 0,
        };
        let end = start + cost;
        for &q in &ins.qubits {
            ready[q] = end;
        }
        if let Some(o) = ins.outcome {
            outcome_ready.insert(o, end);
        }
        depth = depth.max(end);
    }
    depth
}

/// Depth counting measurements as one layer.
pub fn depth(c: &CompiledCircuit) -> usize {
    depth_with(c, DepthModel::WithMeasurements)
}

pub fn clifford_depth(c: &CompiledCircuit) -> usize {
    depth_with(c, DepthModel::Clifford)
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct CostReport {
    pub n_system: usize,
    pub cnot_count: usize,
    pub cz_count: usize,
    pub swap_count: usize,
    pub single_qubit_clifford_count: usize,
    pub two_qubit_clifford_count: usize,
    pub clifford_count: usize,
    pub rotation_count: usize,
    pub two_qubit_unitary_count: usize,
    pub measurements: usize,
    pub resets: usize,
    pub conditioned_paulis: usize,
    pub ancilla_peak: usize,
    pub clifford_depth: usize,
    pub total_depth: usize,
    pub cnot_per_mode: f64,
    pub cz_per_mode: f64,
    pub clifford_per_mode: f64,
    pub two_qubit_clifford_per_mode: f64,
}

pub fn cost_report(c: &CompiledCircuit) -> CostReport {
    let mut r = CostReport { n_system: c.n_system, ..Default::default() };
    for ins in &c.instructions {
        match &ins.gate {
            Gate::Cnot => r.cnot_count += 1,
            Gate::Cz => r.cz_count += 1,
            Gate::Swap => r.swap_count += 1,
            Gate::Unitary2 { .. } => r.two_qubit_unitary_count += 1,
            Gate::MeasureZ | Gate::MeasureX => r.measurements += 1,
            Gate::Reset | Gate::PrepPlus => r.resets += 1,
            Gate::CondPauli(_) => r.conditioned_paulis += 1,
            _ => {}
        }
        let g = &ins.gate;
        if g.is_unitary_gate() && !matches!(g, Gate::Unitary2 { .. }) {
            if g.is_clifford() {
                r.clifford_count += 1;
                if ins.qubits.len() == 2 {
                    r.two_qubit_clifford_count += 1;
                } else {
                    r.single_qubit_clifford_count += 1;
                }
            } else {
                r.rotation_count += 1;
            }
        }
    }
    r.ancilla_peak = ancilla_peak(c);
    r.clifford_depth = clifford_depth(c);
    r.total_depth = depth(c);
    let n = c.n_system.max(1) as f64;
    r.cnot_per_mode = r.cnot_count as f64 / n;
    r.cz_per_mode = r.cz_count as f64 / n;
    r.clifford_per_mode = r.clifford_count as f64 / n;
    r.two_qubit_clifford_per_mode = r.two_qubit_clifford_count as f64 / n;
    r
}

/// Largest number of ancilla qubits holding live content at once. A qubit
/// is live from its first use until it is measured.
pub fn ancilla_peak(c: &CompiledCircuit) -> usize {
    let nq = c.n_qubits();
    let mut live = vec![false; nq];
    let mut count = 0usize;
    let mut peak = 0usize;
    let set = |live: &mut Vec<bool>, count: &mut usize, q: usize, v: bool| {
        if q >= c.n_system && live[q] != v {
            live[q] = v;
            if v {
                *count += 1;
            } else {
                *count -= 1;
            }
        }
    };
    for ins in &c.instructions {
        match &ins.gate {
            Gate::Permute { targets } => {
                let moved: Vec<bool> = ins.qubits.iter().map(|&q| live[q] || q < c.n_system).collect();
                for (t, v) in targets.iter().zip(moved) {
                    set(&mut live, &mut count, *t, v);
                }
            }
            g if g.is_measurement() => set(&mut live, &mut count, ins.qubits[0], false),
            Gate::CondPauli(_) => {}
            _ => {
                for &q in &ins.qubits {
                    set(&mut live, &mut count, q, true);
                }
            }
        }
        peak = peak.max(count);
    }
    peak
}

impl CostReport {
    pub fn to_csv(&self) -> String {
        let v = serde_json::to_value(self).expect("plain struct");
        let obj = v.as_object().expect("object");
        let keys: Vec<&String> = obj.keys().collect();
        let vals: Vec<String> = obj.values().map(Value::to_string).collect();
        format!("{}\n{}\n", keys.iter().map(|k| k.as_str()).collect::<Vec<_>>().join(","), vals.join(","))
    }
}

// ---------------------------------------------------------------- JSON

#[derive(Serialize, Deserialize)]
struct InstructionJson {
    op: String,
    qubits: Vec<usize>,
    theta_num: Value,
    theta_den: Option<u64>,
    matrix: Option<Vec<[f64; 2]>>,
    outcome_id: Option<u32>,
    cond: Option<Condition>,
    layer: u32,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    targets: Option<Vec<usize>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    label: Option<String>,
    #[serde(default, skip_serializing_if = "String::is_empty")]
    pass: String,
}

#[derive(Serialize, Deserialize)]
struct CircuitJson {
    version: u32,
    n_system: usize,
    n_ancilla: usize,
    instructions: Vec<InstructionJson>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    blocks: Vec<Block>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    meta: Option<Value>,
}

fn angle_json(a: &Angle) -> (Value, Option<u64>) {
    match *a {
        Angle::Turns { num, den } => (Value::from(num), Some(den)),
        Angle::Radians(r) => (Value::from(r), None),
    }
}

fn angle_from_json(num: &Value, den: Option<u64>) -> Result<Angle, IrError> {
    match den {
        Some(d) => {
            let n = num.as_i64().ok_or_else(|| IrError::Malformed("theta_num must be an integer".into()))?;
            if d == 0 {
                return Err(IrError::Malformed("theta_den is zero".into()));
            }
            Ok(Angle::turns(n, d))
        }
        None => num
            .as_f64()
            .map(Angle::Radians)
            .ok_or_else(|| IrError::Malformed("theta_num must be a number".into())),
    }
}

impl CompiledCircuit {
    pub fn to_json_value(&self) -> Value {
        let instructions = self
            .instructions
            .iter()
            .map(|ins| {
                let (theta_num, theta_den) = match &ins.gate {
                    Gate::Rz(a) | Gate::Rzz(a) | Gate::Rxx(a) => angle_json(a),
                    _ => (Value::Null, None),
                };
                let (matrix, label) = match &ins.gate {
                    Gate::Unitary2 { matrix, label } => {
                        (Some(matrix.iter().flatten().map(|z| [z.re, z.im]).collect()), Some(label.clone()))
                    }
                    _ => (None, None),
                };
                InstructionJson {
                    op: ins.gate.opcode().to_string(),
                    qubits: ins.qubits.clone(),
                    theta_num,
                    theta_den,
                    matrix,
                    outcome_id: ins.outcome,
                    cond: ins.cond.clone(),
                    layer: ins.layer,
                    targets: match &ins.gate {
                        Gate::Permute { targets } => Some(targets.clone()),
                        _ => None,
                    },
                    label,
                    pass: ins.pass.clone(),
                }
            })
            .collect();
        serde_json::to_value(CircuitJson {
            version: 1,
            n_system: self.n_system,
            n_ancilla: self.n_ancilla,
            instructions,
            blocks: self.blocks.clone(),
            meta: self.meta.clone(),
        })
        .expect("circuit serializes")
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(&self.to_json_value()).expect("circuit serializes")
    }

    pub fn from_json(s: &str) -> Result<Self, IrError> {
        let raw: CircuitJson = serde_json::from_str(s).map_err(|e| IrError::Malformed(e.to_string()))?;
        if raw.version != 1 {
            return Err(IrError::Malformed(format!("unsupported version {}", raw.version)));
        }
        let mut instructions = Vec::with_capacity(raw.instructions.len());
        for j in raw.instructions {
            let angle = || angle_from_json(&j.theta_num, j.theta_den);
            let gate = match j.op.as_str() {
                "cnot" => Gate::Cnot,
                "cz" => Gate::Cz,
                "swap" => Gate::Swap,
                "h" => Gate::H,
                "s" => Gate::S,
                "sdg" => Gate::Sdg,
                "x" => Gate::X,
                "y" => Gate::Y,
                "z" => Gate::Z,
                "rz" => Gate::Rz(angle()?),
                "rzz" => Gate::Rzz(angle()?),
                "rxx" => Gate::Rxx(angle()?),
                "unitary2" => {
                    let m = j.matrix.as_ref().ok_or_else(|| IrError::Malformed("unitary2 without matrix".into()))?;
                    if m.len() != 16 {
                        return Err(IrError::Malformed("unitary2 matrix needs 16 entries".into()));
                    }
                    let mut matrix = [[Complex64::new(0.0, 0.0); 4]; 4];
                    for (k, [re, im]) in m.iter().enumerate() {
                        matrix[k / 4][k % 4] = Complex64::new(*re, *im);
                    }
                    Gate::Unitary2 { matrix, label: j.label.clone().unwrap_or_default() }
                }
                "measure_z" => Gate::MeasureZ,
                "measure_x" => Gate::MeasureX,
                "reset" => Gate::Reset,
                "prep_plus" => Gate::PrepPlus,
                "cond_x" => Gate::CondPauli(PauliAxis::X),
                "cond_y" => Gate::CondPauli(PauliAxis::Y),
                "cond_z" => Gate::CondPauli(PauliAxis::Z),
                "permute" => Gate::Permute {
                    targets: j.targets.clone().ok_or_else(|| IrError::Malformed("permute without targets".into()))?,
                },
                other => return Err(IrError::UnknownOp(other.to_string())),
            };
            instructions.push(Instruction {
                gate,
                qubits: j.qubits,
                outcome: j.outcome_id,
                cond: j.cond,
                layer: j.layer,
                pass: j.pass,
            });
        }
        let c = CompiledCircuit {
            n_system: raw.n_system,
            n_ancilla: raw.n_ancilla,
            instructions,
            blocks: raw.blocks,
            meta: raw.meta,
        };
        c.validate()?;
        Ok(c)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn cap_violation_names_the_shared_mode() {
        let mut c = FermionicCircuit::new(3);
        let z = Complex64::new(0.0, 0.0);
        c.layers.push(vec![FermionicGate::tunneling(0, 1, z, z), FermionicGate::tunneling(1, 2, z, z)]);
        let v = c.validate();
        assert_eq!(v.len(), 1);
        assert_eq!(v[0].mode, Some(1));
        assert!(FermionicCircuit::new(4).validate().is_empty());
    }

    #[test]
    fn serial_chain_depth() {
        let mut b = CircuitBuilder::new(5);
        for q in 0..4 {
            b.cnot(q, q + 1);
        }
        let c = b.finish();
        assert_eq!(depth(&c), 4);
        let mut one = CircuitBuilder::new(2);
        one.cz(0, 1);
        assert_eq!(depth(&one.finish()), 1);
    }

    #[test]
    fn empty_report_is_zero() {
        let r = cost_report(&CompiledCircuit::new(3));
        assert_eq!(r, CostReport { n_system: 3, ..Default::default() });
    }

    #[test]
    fn angles_reduce_and_classify() {
        assert_eq!(Angle::turns(6, 8), Angle::Turns { num: 3, den: 4 });
        assert_eq!(Angle::turns(-1, 4), Angle::Turns { num: 3, den: 4 });
        assert_eq!(Angle::turns(1, 4).quarter_turns(), Some(1));
        assert_eq!(Angle::turns(1, 8).quarter_turns(), None);
        assert_eq!(Angle::Radians(PI).quarter_turns(), Some(2));
    }

    #[test]
    fn json_preserves_conditions() {
        let mut b = CircuitBuilder::new(2);
        let a = b.alloc_ancilla();
        b.cnot(0, a);
        let o = b.measure_x(a);
        b.cond_pauli(PauliAxis::Z, 1, vec![o], 1);
        b.rz(0, Angle::turns(1, 16));
        b.rz(1, Angle::Radians(0.25));
        b.permute(&[0, 1], &[1, 0]);
        let c = b.finish();
        let back = CompiledCircuit::from_json(&c.to_json()).unwrap();
        assert_eq!(back, c);
    }

    #[test]
    fn materialized_relabel_uses_cycle_swaps() {
        let mut b = CircuitBuilder::new(3);
        b.permute(&[0, 1, 2], &[1, 2, 0]);
        let c = b.finish().materialize_swaps();
        assert_eq!(c.count(|g| *g == Gate::Swap), 2);
    }
}
