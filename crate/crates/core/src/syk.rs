//! Quartic Majorana (SYK-type) models: instance sampling, interaction
//! coloring, Trotter cycles compiled through Majorana permutations, and
//! spectral form factors by exact diagonalization.
//!
//! Majoranas are Pauli-normalized (`χ² = 1`), so four consecutive ones obey
//! `χ_{2i} χ_{2i+1} χ_{2i+2} χ_{2i+3} = −Z_i Z_{i+1}`.

use std::collections::HashSet;

use nalgebra::DVector;
use num_complex::Complex64;
use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Binomial, Distribution, Normal};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::circuit_ir::{cost_report, Angle, CircuitBuilder, CompiledCircuit, CostReport};
use crate::jw::{jw_majorana, JwError, OrderingMap, PauliString, Permutation};
use crate::majorana::{emit_majorana_permutation, MajoranaPermutation};
use crate::perm::{CompileOptions, InterleavePerm, PermError, Strategy};
use crate::verify::fock::{expm_hermitian, oracle_cap, CMatrix, FockError};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum SykError {
    #[error("{0} Majoranas: need an even count of at least 4")]
    BadSize(usize),
    #[error("cannot place degree {d} on {n} Majoranas without repeating a term")]
    Infeasible { n: usize, d: usize },
    #[error("invalid term {0:?}")]
    InvalidTerm([usize; 4]),
    #[error("class {class}: {reason}")]
    BadClass { class: usize, reason: String },
    #[error("{0} Majoranas exceeds the diagonalization cap")]
    CapExceeded(usize),
    #[error(transparent)]
    Perm(#[from] PermError),
    #[error(transparent)]
    Jw(#[from] JwError),
    #[error(transparent)]
    Fock(#[from] FockError),
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SykTerm {
    /// Strictly increasing Majorana indices.
    pub idx: [usize; 4],
    pub j: f64,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SykModel {
    Sparse,
    Complete,
    Interleave,
}

/// A set of Majorana-disjoint terms, optionally with the frame in which
/// they sit on consecutive slots.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SykLayer {
    pub terms: Vec<usize>,
    pub frame: Option<Permutation>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SykInstance {
    pub model: SykModel,
    pub n_majorana: usize,
    pub terms: Vec<SykTerm>,
    pub degree: usize,
    pub seed: u64,
    /// Generation rounds; each is a valid color class.
    pub layers: Vec<SykLayer>,
}

impl SykInstance {
    pub fn validate(&self) -> Result<(), SykError> {
        check_size(self.n_majorana)?;
        for t in &self.terms {
            let ok = t.idx.windows(2).all(|w| w[0] < w[1]) && t.idx[3] < self.n_majorana && t.j.is_finite();
            if !ok {
                return Err(SykError::InvalidTerm(t.idx));
            }
        }
        Ok(())
    }

    /// Number of terms touching each Majorana.
    pub fn degrees(&self) -> Vec<usize> {
        let mut d = vec![0; self.n_majorana];
        for t in &self.terms {
            for &i in &t.idx {
                d[i] += 1;
            }
        }
        d
    }
}

fn check_size(n: usize) -> Result<(), SykError> {
    if n < 4 || n % 2 != 0 {
        Err(SykError::BadSize(n))
    } else {
        Ok(())
    }
}

/// Coupling standard deviation `sqrt(6 J² / N³)`.
pub fn coupling_sigma(n_majorana: usize, j: f64) -> f64 {
    (6.0 * j * j / (n_majorana as f64).powi(3)).sqrt()
}

fn normal(n: usize, j: f64) -> Normal<f64> {
    Normal::new(0.0, coupling_sigma(n, j)).expect("finite sigma")
}

/// `d` rounds of random perfect matchings into quadruples. When `4 ∤ n` the
/// leftover Majoranas of a round sit out, so their degree falls short of `d`.
pub fn sample_sparse_syk(n_majorana: usize, d: usize, j: f64, seed: u64) -> Result<SykInstance, SykError> {
    check_size(n_majorana)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let dist = normal(n_majorana, j);
    let mut seen: HashSet<[usize; 4]> = HashSet::new();
    let mut terms = Vec::new();
    let mut layers = Vec::new();
    let mut order: Vec<usize> = (0..n_majorana).collect();
    for _ in 0..d {
        let mut round = None;
        for _ in 0..1000 {
            order.shuffle(&mut rng);
            let quads: Vec<[usize; 4]> = order
                .chunks_exact(4)
                .map(|c| {
                    let mut q = [c[0], c[1], c[2], c[3]];
                    q.sort_unstable();
                    q
                })
                .collect();
            if quads.iter().all(|q| !seen.contains(q)) {
                round = Some(quads);
                break;
            }
        }
        let quads = round.ok_or(SykError::Infeasible { n: n_majorana, d })?;
        let start = terms.len();
        for q in quads {
            seen.insert(q);
            terms.push(SykTerm { idx: q, j: dist.sample(&mut rng) });
        }
        layers.push(SykLayer { terms: (start..terms.len()).collect(), frame: None });
    }
    Ok(SykInstance { model: SykModel::Sparse, n_majorana, terms, degree: d, seed, layers })
}

/// Each quadruple kept independently with the probability that gives mean
/// degree `d`; degrees then fluctuate from Majorana to Majorana.
pub fn sample_sparse_syk_erdos_renyi(n_majorana: usize, d: usize, j: f64, seed: u64) -> Result<SykInstance, SykError> {
    check_size(n_majorana)?;
    let n = n_majorana as u64;
    let total = n * (n - 1) * (n - 2) * (n - 3) / 24;
    let p = (n_majorana * d) as f64 / (4.0 * total as f64);
    if p > 0.5 {
        return Err(SykError::Infeasible { n: n_majorana, d });
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let count = Binomial::new(total, p).expect("valid probability").sample(&mut rng) as usize;
    let dist = normal(n_majorana, j);
    let mut seen: HashSet<[usize; 4]> = HashSet::new();
    let mut terms = Vec::with_capacity(count);
    while terms.len() < count {
        let picked = rand::seq::index::sample(&mut rng, n_majorana, 4);
        let mut q = [picked.index(0), picked.index(1), picked.index(2), picked.index(3)];
        q.sort_unstable();
        if seen.insert(q) {
            terms.push(SykTerm { idx: q, j: dist.sample(&mut rng) });
        }
    }
    Ok(SykInstance { model: SykModel::Sparse, n_majorana, terms, degree: d, seed, layers: Vec::new() })
}

/// Every quadruple `i < j < k < l` with an independent coupling.
pub fn sample_complete_syk(n_majorana: usize, j: f64, seed: u64) -> Result<SykInstance, SykError> {
    check_size(n_majorana)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let dist = normal(n_majorana, j);
    let n = n_majorana;
    let mut terms = Vec::new();
    for a in 0..n {
        for b in a + 1..n {
            for c in b + 1..n {
                for e in c + 1..n {
                    terms.push(SykTerm { idx: [a, b, c, e], j: dist.sample(&mut rng) });
                }
            }
        }
    }
    let degree = (n - 1) * (n - 2) * (n - 3) / 6;
    Ok(SykInstance { model: SykModel::Complete, n_majorana, terms, degree, seed, layers: Vec::new() })
}

/// Interleave of the two halves of `n` slots with a uniformly random merge.
pub fn random_interleave(n: usize, rng: &mut ChaCha8Rng) -> InterleavePerm {
    let split = n / 2;
    let mut from_a: Vec<bool> = (0..n).map(|k| k < split).collect();
    from_a.shuffle(rng);
    let mut images = vec![0; n];
    let (mut ia, mut ib) = (0, split);
    for (slot, &a) in from_a.iter().enumerate() {
        if a {
            images[ia] = slot;
            ia += 1;
        } else {
            images[ib] = slot;
            ib += 1;
        }
    }
    InterleavePerm::new(Permutation::new(images).expect("merge is a bijection"), split).expect("merge preserves order")
}

fn offsets_per_round(layout: RoundLayout) -> usize {
    match layout {
        RoundLayout::Blocks => 1,
        RoundLayout::Chain => 2,
    }
}

fn sorted_with_sign(mut v: [usize; 4]) -> ([usize; 4], f64) {
    let mut sign = 1.0;
    for i in 0..4 {
        for k in 0..3 - i {
            if v[k] > v[k + 1] {
                v.swap(k, k + 1);
                sign = -sign;
            }
        }
    }
    (v, sign)
}

/// Which runs of four consecutive slots an interleave round couples.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RoundLayout {
    /// Disjoint blocks `4t..4t+3`: one term per Majorana per round.
    #[default]
    Blocks,
    /// Every even offset `2i..2i+3`, the full `Z_i Z_{i+1}` chain: two terms
    /// per Majorana per round, split into two disjoint layers.
    Chain,
}

impl std::str::FromStr for RoundLayout {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "blocks" => Ok(Self::Blocks),
            "chain" => Ok(Self::Chain),
            _ => Err(format!("unknown layout {s:?}")),
        }
    }
}

/// Round `r` applies a random interleave to the slot order and couples each
/// block of four consecutive slots. The frame of round `r` is the
/// composition of the first `r` interleaves.
pub fn sample_interleave_syk(n_majorana: usize, rounds: usize, j: f64, seed: u64) -> Result<SykInstance, SykError> {
    sample_interleave_syk_with(n_majorana, rounds, j, seed, RoundLayout::Blocks)
}

pub fn sample_interleave_syk_with(
    n_majorana: usize,
    rounds: usize,
    j: f64,
    seed: u64,
    layout: RoundLayout,
) -> Result<SykInstance, SykError> {
    check_size(n_majorana)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let dist = normal(n_majorana, j);
    let mut frame = Permutation::identity(n_majorana);
    let mut terms = Vec::new();
    let mut layers = Vec::new();
    for _ in 0..rounds {
        let step = random_interleave(n_majorana, &mut rng);
        frame = step.p.compose(&frame)?;
        let inv = frame.inverse();
        let offsets: &[usize] = match layout {
            RoundLayout::Blocks => &[0],
            RoundLayout::Chain => &[0, 2],
        };
        for &off in offsets {
            let start = terms.len();
            for first in (off..n_majorana.saturating_sub(3)).step_by(4) {
                let slots = [first, first + 1, first + 2, first + 3];
                let (idx, sign) = sorted_with_sign(slots.map(|s| inv.apply(s)));
                terms.push(SykTerm { idx, j: sign * dist.sample(&mut rng) });
            }
            layers.push(SykLayer { terms: (start..terms.len()).collect(), frame: Some(frame.clone()) });
        }
    }
    let degree = rounds * offsets_per_round(layout);
    Ok(SykInstance { model: SykModel::Interleave, n_majorana, terms, degree, seed, layers })
}

// ------------------------------------------------------------- scheduling

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ColorClass {
    pub terms: Vec<SykTerm>,
    /// Majorana index to slot; each term occupies four consecutive slots
    /// starting at an even slot.
    pub frame: Permutation,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ColoredSchedule {
    pub n_majorana: usize,
    pub classes: Vec<ColorClass>,
}

impl ColoredSchedule {
    pub fn n_terms(&self) -> usize {
        self.classes.iter().map(|c| c.terms.len()).sum()
    }
}

/// Term `t` at slots `4t..4t+3` in class order, other Majoranas after them in
/// increasing order.
pub fn packed_frame(n_majorana: usize, terms: &[SykTerm]) -> Permutation {
    let mut order: Vec<usize> = terms.iter().flat_map(|t| t.idx).collect();
    let used: HashSet<usize> = order.iter().copied().collect();
    order.extend((0..n_majorana).filter(|i| !used.contains(i)));
    Permutation::new(order).expect("terms are Majorana-disjoint").inverse()
}

/// Greedy coloring of the term conflict graph, largest degree first.
pub fn color_interactions(inst: &SykInstance) -> ColoredSchedule {
    let n = inst.n_majorana;
    let mut by_majorana: Vec<Vec<usize>> = vec![Vec::new(); n];
    for (t, term) in inst.terms.iter().enumerate() {
        for &i in &term.idx {
            by_majorana[i].push(t);
        }
    }
    let neighbors: Vec<Vec<usize>> = inst
        .terms
        .iter()
        .enumerate()
        .map(|(t, term)| {
            let mut v: Vec<usize> = term.idx.iter().flat_map(|&i| by_majorana[i].iter().copied()).filter(|&u| u != t).collect();
            v.sort_unstable();
            v.dedup();
            v
        })
        .collect();
    let mut order: Vec<usize> = (0..inst.terms.len()).collect();
    order.sort_by_key(|&t| (std::cmp::Reverse(neighbors[t].len()), t));
    let mut color = vec![usize::MAX; inst.terms.len()];
    for &t in &order {
        let taken: HashSet<usize> = neighbors[t].iter().map(|&u| color[u]).collect();
        color[t] = (0..).find(|c| !taken.contains(c)).expect("unbounded colors");
    }
    let n_colors = color.iter().map(|&c| c + 1).max().unwrap_or(0);
    let classes = (0..n_colors)
        .map(|c| {
            let terms: Vec<SykTerm> = (0..inst.terms.len()).filter(|&t| color[t] == c).map(|t| inst.terms[t].clone()).collect();
            let frame = packed_frame(n, &terms);
            ColorClass { terms, frame }
        })
        .collect();
    ColoredSchedule { n_majorana: n, classes }
}

/// Largest number of terms sharing a Majorana with one term.
pub fn max_conflict_degree(inst: &SykInstance) -> usize {
    let mut by_majorana: Vec<Vec<usize>> = vec![Vec::new(); inst.n_majorana];
    for (t, term) in inst.terms.iter().enumerate() {
        for &i in &term.idx {
            by_majorana[i].push(t);
        }
    }
    inst.terms
        .iter()
        .enumerate()
        .map(|(t, term)| {
            let s: HashSet<usize> = term.idx.iter().flat_map(|&i| by_majorana[i].iter().copied()).filter(|&u| u != t).collect();
            s.len()
        })
        .max()
        .unwrap_or(0)
}

/// The instance's own generation rounds as classes, using their frames when
/// present, or the greedy coloring when that needs fewer classes.
pub fn schedule(inst: &SykInstance) -> ColoredSchedule {
    let greedy = color_interactions(inst);
    if inst.layers.is_empty() || (greedy.classes.len() < inst.layers.len() && inst.model != SykModel::Interleave) {
        return greedy;
    }
    let classes = inst
        .layers
        .iter()
        .map(|layer| {
            let terms: Vec<SykTerm> = layer.terms.iter().map(|&t| inst.terms[t].clone()).collect();
            let frame = layer.frame.clone().unwrap_or_else(|| packed_frame(inst.n_majorana, &terms));
            ColorClass { terms, frame }
        })
        .collect();
    ColoredSchedule { n_majorana: inst.n_majorana, classes }
}

/// Slot of each term and the sign relating the term to the ascending slot product.
fn placements(class: &ColorClass, index: usize) -> Result<Vec<(usize, f64)>, SykError> {
    let mut used = HashSet::new();
    class
        .terms
        .iter()
        .map(|t| {
            let (slots, sign) = sorted_with_sign(t.idx.map(|i| class.frame.apply(i)));
            let bad = |reason: String| SykError::BadClass { class: index, reason };
            if slots[0] % 2 != 0 || slots.windows(2).any(|w| w[1] != w[0] + 1) {
                return Err(bad(format!("term {:?} lands on slots {slots:?}", t.idx)));
            }
            if !t.idx.iter().all(|&i| used.insert(i)) {
                return Err(bad(format!("term {:?} overlaps another term", t.idx)));
            }
            Ok((slots[0], sign))
        })
        .collect()
}

// ------------------------------------------------------------ compilation

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CycleOptions {
    /// Return to the identity frame at the end of the cycle.
    pub close_frame: bool,
    pub strategy: Strategy,
    pub compile: CompileOptions,
}

impl Default for CycleOptions {
    fn default() -> Self {
        Self { close_frame: true, strategy: Strategy::Auto, compile: CompileOptions::default() }
    }
}

/// One first-order Trotter cycle: for each class in order, a Majorana
/// permutation into the class frame followed by parallel ZZ rotations.
/// Consecutive frames are joined by a single permutation.
pub fn compile_trotter_cycle(sched: &ColoredSchedule, dt: f64, opts: &CycleOptions) -> Result<CompiledCircuit, SykError> {
    let n = sched.n_majorana;
    check_size(n)?;
    let sys: Vec<usize> = (0..n / 2).collect();
    let mut b = CircuitBuilder::new(n / 2);
    let mut current = Permutation::identity(n);
    for (index, class) in sched.classes.iter().enumerate() {
        let places = placements(class, index)?;
        let step = class.frame.compose(&current.inverse())?;
        emit_majorana_permutation(&mut b, &sys, &MajoranaPermutation::new(step)?, opts.strategy, &opts.compile);
        current = class.frame.clone();
        b.set_pass("ising");
        // exp(−i·J·dt·χχχχ) = exp(+i·J·dt·ZZ) = Rzz(−2·J·dt)
        for (t, &(slot, sign)) in class.terms.iter().zip(&places) {
            let q = slot / 2;
            b.rzz(q, q + 1, Angle::Radians(-2.0 * sign * t.j * dt));
        }
        b.next_layer();
    }
    if opts.close_frame {
        emit_majorana_permutation(&mut b, &sys, &MajoranaPermutation::new(current.inverse())?, opts.strategy, &opts.compile);
    }
    Ok(b.finish())
}

#[derive(Clone, Debug, Serialize)]
pub struct SykCycleCost {
    pub n_majorana: usize,
    pub classes: usize,
    pub terms: usize,
    pub clifford_per_majorana: f64,
    pub report: CostReport,
}

/// Gate counts of a compiled cycle, normalized per Majorana mode.
pub fn cycle_cost(sched: &ColoredSchedule, c: &CompiledCircuit) -> SykCycleCost {
    let report = cost_report(c);
    SykCycleCost {
        n_majorana: sched.n_majorana,
        classes: sched.classes.len(),
        terms: sched.n_terms(),
        clifford_per_majorana: report.clifford_count as f64 / sched.n_majorana as f64,
        report,
    }
}

// ------------------------------------------------------ dense references

fn term_pauli(n_majorana: usize, idx: &[usize; 4]) -> PauliString {
    let m = OrderingMap::identity(n_majorana / 2);
    let mut p = jw_majorana(&m, idx[0]);
    for &i in &idx[1..] {
        p.mul_assign_right(&jw_majorana(&m, i));
    }
    p
}

/// Dense `Σ J χ_i χ_j χ_k χ_l` on `n/2` qubits.
pub fn terms_dense(n_majorana: usize, terms: &[SykTerm]) -> Result<CMatrix, SykError> {
    if n_majorana / 2 > oracle_cap() {
        return Err(SykError::CapExceeded(n_majorana));
    }
    let dim = 1usize << (n_majorana / 2);
    let mut h = CMatrix::zeros(dim, dim);
    for t in terms {
        term_pauli(n_majorana, &t.idx).add_scaled_to(Complex64::new(t.j, 0.0), &mut h);
    }
    Ok(h)
}

pub fn hamiltonian_dense(inst: &SykInstance) -> Result<CMatrix, SykError> {
    terms_dense(inst.n_majorana, &inst.terms)
}

/// `Π_α exp(−i H_α dt)` with the first class applied first.
pub fn trotter_reference(sched: &ColoredSchedule, dt: f64) -> Result<CMatrix, SykError> {
    if sched.n_majorana / 2 > oracle_cap() {
        return Err(SykError::CapExceeded(sched.n_majorana));
    }
    let dim = 1usize << (sched.n_majorana / 2);
    let mut u = CMatrix::identity(dim, dim);
    for class in &sched.classes {
        u = expm_hermitian(&terms_dense(sched.n_majorana, &class.terms)?, dt) * u;
    }
    Ok(u)
}

// ------------------------------------------------- spectral form factor

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SffCurve {
    pub times: Vec<f64>,
    pub mean: Vec<f64>,
    pub stderr: Vec<f64>,
}

impl SffCurve {
    pub fn from_samples(times: &[f64], samples: &[Vec<f64>]) -> Self {
        let m = samples.len() as f64;
        let mean: Vec<f64> = (0..times.len()).map(|k| samples.iter().map(|s| s[k]).sum::<f64>() / m).collect();
        let stderr = (0..times.len())
            .map(|k| {
                if samples.len() < 2 {
                    return 0.0;
                }
                let var = samples.iter().map(|s| (s[k] - mean[k]).powi(2)).sum::<f64>() / (m - 1.0);
                (var / m).sqrt()
            })
            .collect();
        Self { times: times.to_vec(), mean, stderr }
    }

    /// Index and value of the minimum of the mean curve.
    pub fn dip(&self) -> (usize, f64) {
        self.mean.iter().copied().enumerate().fold((0, f64::INFINITY), |a, (k, v)| if v < a.1 { (k, v) } else { a })
    }
}

/// Bootstrap standard error of the dip of the mean curve, resampling instances.
pub fn bootstrap_dip_stderr(samples: &[Vec<f64>], reps: usize, seed: u64) -> f64 {
    use rand::Rng;
    let m = samples.len();
    if m < 2 || reps < 2 {
        return 0.0;
    }
    let points = samples[0].len();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let dips: Vec<f64> = (0..reps)
        .map(|_| {
            let mut mean = vec![0.0; points];
            for _ in 0..m {
                let s = &samples[rng.gen_range(0..m)];
                for (acc, v) in mean.iter_mut().zip(s) {
                    *acc += v / m as f64;
                }
            }
            mean.into_iter().fold(f64::INFINITY, f64::min)
        })
        .collect();
    let mu = dips.iter().sum::<f64>() / reps as f64;
    (dips.iter().map(|d| (d - mu).powi(2)).sum::<f64>() / (reps - 1) as f64).sqrt()
}

pub const SFF_MAX_MAJORANAS: usize = 16;

pub fn eigenvalues(inst: &SykInstance) -> Result<DVector<f64>, SykError> {
    if inst.n_majorana > SFF_MAX_MAJORANAS {
        return Err(SykError::CapExceeded(inst.n_majorana));
    }
    Ok(hamiltonian_dense(inst)?.symmetric_eigenvalues())
}

/// `|Tr e^{−(β+it)H}|² / |Tr e^{−βH}|²` on the grid `times`.
pub fn sff_from_spectrum(energies: &[f64], times: &[f64], beta: f64) -> Vec<f64> {
    let weights: Vec<f64> = energies.iter().map(|&e| (-beta * e).exp()).collect();
    let z: f64 = weights.iter().sum();
    times
        .iter()
        .map(|&t| {
            let tr: Complex64 = energies.iter().zip(&weights).map(|(&e, &w)| Complex64::from_polar(w, -t * e)).sum();
            tr.norm_sqr() / (z * z)
        })
        .collect()
}

/// Per-instance form factors, diagonalized in parallel, in instance order.
pub fn sff_samples(instances: &[SykInstance], times: &[f64], beta: f64) -> Result<Vec<Vec<f64>>, SykError> {
    instances
        .par_iter()
        .map(|inst| {
            let e = eigenvalues(inst)?;
            Ok(sff_from_spectrum(e.as_slice(), times, beta))
        })
        .collect()
}

/// Disorder-averaged spectral form factor.
pub fn spectral_form_factor(instances: &[SykInstance], times: &[f64], beta: f64) -> Result<SffCurve, SykError> {
    Ok(SffCurve::from_samples(times, &sff_samples(instances, times, beta)?))
}

/// `points` times spaced evenly in `log t` over `[t_min, t_max]`.
pub fn log_times(t_min: f64, t_max: f64, points: usize) -> Vec<f64> {
    if points < 2 {
        return vec![t_min];
    }
    let (a, b) = (t_min.ln(), t_max.ln());
    (0..points).map(|k| (a + (b - a) * k as f64 / (points - 1) as f64).exp()).collect()
}
