//! Correctness engines: symbolic Pauli propagation, a dense Fock-space
//! oracle and single-particle mode tracking.

pub mod fock;
pub mod symbolic;
pub mod transfer;

use std::time::Instant;

use serde::Serialize;

use crate::circuit_ir::CompiledCircuit;
use crate::jw::{jw_majorana_on, OrderingMap};

pub use fock::{branch_with_outcomes, channel_branches, unitary_equal_up_to_phase, unitary_of, Branch, CMatrix, FockError};
pub use symbolic::{pauli_conjugate, propagate, SymbolicError, SymbolicPauli};
pub use transfer::{mode_transfer, ModeTransfer, TransferError};

#[derive(Clone, Debug, Serialize, PartialEq, Eq)]
pub struct MajoranaFailure {
    pub majorana: usize,
    pub expected: String,
    pub got: String,
    pub outcome_dependent: bool,
}

#[derive(Clone, Debug, Serialize)]
pub struct Timings {
    pub propagate_ms: f64,
}

#[derive(Clone, Debug, Serialize)]
pub struct VerificationReport {
    pub pass: bool,
    pub checked: usize,
    pub failures: Vec<MajoranaFailure>,
    pub strategy: String,
    pub timings: Timings,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
}

impl VerificationReport {
    pub fn with_strategy(mut self, s: &str) -> Self {
        self.strategy = s.to_string();
        self
    }
}

/// Checks `c χ_mu c† = χ_{perm[mu]}` with `χ` encoded under `m0` on input
/// and `m1` on output, for every Majorana `mu`.
pub fn verify_majorana_map(c: &CompiledCircuit, m0: &OrderingMap, m1: &OrderingMap, perm: &[usize]) -> VerificationReport {
    let n_maj = 2 * m0.n();
    let nq = c.n_qubits();
    let start = Instant::now();
    let inputs: Vec<_> = (0..n_maj).map(|mu| jw_majorana_on(m0, mu, nq)).collect();
    let result = propagate(c, &inputs);
    let propagate_ms = start.elapsed().as_secs_f64() * 1e3;
    let timings = Timings { propagate_ms };
    let outputs = match result {
        Ok(o) => o,
        Err(e) => {
            return VerificationReport {
                pass: false,
                checked: 0,
                failures: Vec::new(),
                strategy: String::new(),
                timings,
                error: Some(e.to_string()),
            }
        }
    };
    let failures: Vec<MajoranaFailure> = outputs
        .iter()
        .enumerate()
        .filter_map(|(mu, got)| {
            let expected = jw_majorana_on(m1, perm[mu], nq);
            let dependent = !got.is_outcome_independent();
            (dependent || got.base != expected).then(|| MajoranaFailure {
                majorana: mu,
                expected: expected.to_string(),
                got: got.base.to_string(),
                outcome_dependent: dependent,
            })
        })
        .collect();
    VerificationReport {
        pass: failures.is_empty(),
        checked: n_maj,
        failures,
        strategy: String::new(),
        timings,
        error: None,
    }
}

/// Checks that `c` maps the encoding `m0` to `m1`: `c J_{m0}[χ_mu] c† = J_{m1}[χ_mu]`.
pub fn verify_permutation_circuit(c: &CompiledCircuit, m0: &OrderingMap, m1: &OrderingMap) -> VerificationReport {
    let id: Vec<usize> = (0..2 * m0.n()).collect();
    verify_majorana_map(c, m0, m1, &id)
}

/// Checks a Majorana permutation circuit in identity ordering.
pub fn verify_majorana_circuit(c: &CompiledCircuit, perm: &[usize]) -> VerificationReport {
    let m = OrderingMap::identity(perm.len() / 2);
    verify_majorana_map(c, &m, &m, perm)
}

/// Dense check that every measurement branch of `c` applies `target` on the
/// system register.
pub fn verify_channel(c: &CompiledCircuit, target: &CMatrix, tol: f64) -> Result<(), String> {
    let branches = channel_branches(c).map_err(|e| e.to_string())?;
    fock::check_deterministic_channel(&branches, target, tol)
}
