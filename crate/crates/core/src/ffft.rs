//! Fermionic fast Fourier transform circuits and their fault-tolerant cost
//! formulas.
//!
//! The transform maps `c_x† → N^{-1/2} Σ_k e^{2πi kx/N} c_k†` with momentum
//! `k` left at position `k`. One recursion step on a block of size `N`:
//! un-riffle evens and odds, transform both halves, riffle the halves back
//! together, apply `F_{a,N} = F₂·(I ⊗ R_z(2πa/N))` to each adjacent pair
//! `(2a, 2a+1)` with the rotation on the upper qubit, and un-riffle.

use std::collections::BTreeSet;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::circuit_ir::{Angle, CircuitBuilder, CompiledCircuit, Matrix4};
use crate::jw::Permutation;
use crate::perm::interleave::{emit_interleave, emit_interleave_inverse};
use crate::perm::structured::emit_structured;
use crate::verify::fock::CMatrix;
use crate::perm::{emit_permutation, CompileOptions, InterleavePerm, PermError, StructuredKind, StructuredPerm, Strategy};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum FfftError {
    #[error("{0} is not a positive power of two")]
    NotPowerOfTwo(usize),
    #[error("angle {0} is not a dyadic fraction of a turn")]
    NonDyadic(String),
    #[error(transparent)]
    Perm(#[from] PermError),
}

/// The two-mode mixer with matrix index `b(lower) + 2·b(upper)`.
pub fn f2_gate() -> Matrix4 {
    let z = Complex64::new(0.0, 0.0);
    let one = Complex64::new(1.0, 0.0);
    let h = Complex64::new(std::f64::consts::FRAC_1_SQRT_2, 0.0);
    [[one, z, z, z], [z, h, h, z], [z, h, -h, z], [z, z, z, -one]]
}

/// One `F_{a,N}` placement: `R_z(2πa/den)` on `upper`, then `F₂` on `(lower, upper)`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct FGate {
    pub lower: usize,
    pub upper: usize,
    pub a: u64,
    pub den: u64,
}

impl FGate {
    pub fn angle(&self) -> Angle {
        Angle::turns(self.a as i64, self.den)
    }
}

/// One recursion level: every block of size `block` at the listed offsets.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct FfftLevel {
    pub block: usize,
    pub offsets: Vec<usize>,
    /// Riffle of the two halves of a block; its inverse is the un-riffle.
    pub riffle: InterleavePerm,
    pub gates: Vec<FGate>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct FfftPlan {
    pub n: u32,
    pub dims: Vec<usize>,
    /// Levels by increasing block size `2, 4, …, 2ⁿ`.
    pub levels: Vec<FfftLevel>,
}

impl FfftPlan {
    pub fn n_modes(&self) -> usize {
        1 << self.n
    }

    /// Interleave layers in emission order; levels with blocks of 2 need none.
    pub fn interleave_layers(&self) -> usize {
        3 * self.levels.iter().filter(|l| l.block > 2).count()
    }

    pub fn angles(&self) -> impl Iterator<Item = Angle> + '_ {
        self.levels.iter().flat_map(|l| l.gates.iter().map(FGate::angle))
    }
}

pub fn plan_ffft_1d(n: u32) -> FfftPlan {
    assert!(n >= 1, "FFFT needs at least two modes");
    let modes = 1usize << n;
    let levels = (1..=n)
        .map(|l| {
            let block = 1usize << l;
            let offsets: Vec<usize> = (0..modes).step_by(block).collect();
            let gates = offsets
                .iter()
                .flat_map(|&off| {
                    (0..block / 2).map(move |a| FGate {
                        lower: off + 2 * a,
                        upper: off + 2 * a + 1,
                        a: a as u64,
                        den: block as u64,
                    })
                })
                .collect();
            FfftLevel { block, offsets, riffle: InterleavePerm::riffle(block), gates }
        })
        .collect();
    FfftPlan { n, dims: vec![modes], levels }
}

/// Emits the 1D transform of `plan` on `qubits` (increasing positions).
pub fn emit_ffft_1d(b: &mut CircuitBuilder, qubits: &[usize], plan: &FfftPlan, opts: &CompileOptions) {
    assert_eq!(qubits.len(), plan.n_modes());
    let prev = b.set_pass("ffft");
    let f2 = f2_gate();
    let interleave_layer = |b: &mut CircuitBuilder, level: &FfftLevel, inverse: bool| {
        if level.block <= 2 {
            return;
        }
        let opened = b.begin_parallel();
        for &off in &level.offsets {
            let q = &qubits[off..off + level.block];
            if inverse {
                emit_interleave_inverse(b, q, &level.riffle, opts);
            } else {
                emit_interleave(b, q, &level.riffle, opts);
            }
        }
        b.end_parallel(opened);
        b.next_layer();
    };
    for level in plan.levels.iter().rev() {
        interleave_layer(b, level, true);
    }
    for level in &plan.levels {
        interleave_layer(b, level, false);
        for g in level.gates.iter().filter(|g| g.a != 0) {
            b.rz(qubits[g.upper], g.angle());
        }
        for g in &level.gates {
            b.unitary2(qubits[g.lower], qubits[g.upper], f2, "F2");
        }
        b.next_layer();
        interleave_layer(b, level, true);
    }
    b.set_pass(&prev);
}

pub fn build_ffft_1d(n: u32) -> (CompiledCircuit, FfftPlan) {
    build_ffft_1d_with(n, &CompileOptions::default())
}

pub fn build_ffft_1d_with(n: u32, opts: &CompileOptions) -> (CompiledCircuit, FfftPlan) {
    let plan = plan_ffft_1d(n);
    let mut b = CircuitBuilder::new(plan.n_modes());
    let qubits: Vec<usize> = (0..plan.n_modes()).collect();
    emit_ffft_1d(&mut b, &qubits, &plan, opts);
    (b.finish(), plan)
}

fn log2_exact(l: usize) -> Result<u32, FfftError> {
    if l >= 2 && l.is_power_of_two() {
        Ok(l.trailing_zeros())
    } else {
        Err(FfftError::NotPowerOfTwo(l))
    }
}

/// Square 2D transform on an `l × l` row-major grid.
pub fn build_ffft_2d(l: usize) -> Result<CompiledCircuit, FfftError> {
    build_ffft_2d_rect(l, l, &CompileOptions::default())
}

/// 2D transform on an `l_r × l_c` row-major grid: row transforms, a 2D
/// reflection to column-major order, column transforms, reflection back.
/// Momentum `(k_r, k_c)` ends at position `k_r·l_c + k_c`.
pub fn build_ffft_2d_rect(l_r: usize, l_c: usize, opts: &CompileOptions) -> Result<CompiledCircuit, FfftError> {
    let (n_r, n_c) = (log2_exact(l_r)?, log2_exact(l_c)?);
    let (row_plan, col_plan) = (plan_ffft_1d(n_c), plan_ffft_1d(n_r));
    let all: Vec<usize> = (0..l_r * l_c).collect();
    let mut b = CircuitBuilder::new(l_r * l_c);

    let opened = b.begin_parallel();
    for r in 0..l_r {
        emit_ffft_1d(&mut b, &all[r * l_c..(r + 1) * l_c], &row_plan, opts);
    }
    b.end_parallel(opened);
    emit_structured(&mut b, &all, &StructuredPerm::new(StructuredKind::Reflect2D(l_r, l_c))?, opts);
    b.next_layer();

    let opened = b.begin_parallel();
    for c in 0..l_c {
        emit_ffft_1d(&mut b, &all[c * l_r..(c + 1) * l_r], &col_plan, opts);
    }
    b.end_parallel(opened);
    emit_structured(&mut b, &all, &StructuredPerm::new(StructuredKind::Reflect2D(l_c, l_r))?, opts);
    Ok(b.finish())
}

/// `F[k][x] = N^{-1/2} e^{2πi kx/N}`, the single-particle transform.
pub fn dft_matrix(n: usize) -> CMatrix {
    let s = 1.0 / (n as f64).sqrt();
    CMatrix::from_fn(n, n, |k, x| {
        Complex64::from_polar(s, 2.0 * std::f64::consts::PI * ((k * x) % n) as f64 / n as f64)
    })
}

/// Single-particle transform of the `l_r × l_c` grid transform.
pub fn dft_2d(l_r: usize, l_c: usize) -> CMatrix {
    dft_matrix(l_r).kronecker(&dft_matrix(l_c))
}

fn subsets(n: usize, k: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut cur = Vec::with_capacity(k);
    fn rec(start: usize, n: usize, k: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == k {
            out.push(cur.clone());
            return;
        }
        for i in start..n {
            cur.push(i);
            rec(i + 1, n, k, cur, out);
            cur.pop();
        }
    }
    rec(0, n, k, &mut cur, &mut out);
    out
}

/// Largest deviation of the `k`-particle block of a dense `2ⁿ × 2ⁿ` unitary
/// from the Slater determinants of the single-particle matrix `f`, after
/// factoring out the vacuum phase.
pub fn fock_sector_error(u: &CMatrix, f: &CMatrix, k: usize) -> f64 {
    let n = f.nrows();
    assert_eq!(u.nrows(), 1 << n, "dense unitary must act on the modes only");
    let vac = u[(0, 0)];
    let phase = vac / vac.norm();
    let sets = subsets(n, k);
    let index = |s: &[usize]| s.iter().map(|&i| 1usize << i).sum::<usize>();
    let mut worst = (vac.norm() - 1.0).abs();
    for xs in &sets {
        for ks in &sets {
            let minor = CMatrix::from_fn(k, k, |r, c| f[(ks[r], xs[c])]);
            let want = if k == 0 { Complex64::new(1.0, 0.0) } else { minor.determinant() };
            worst = worst.max((u[(index(ks), index(xs))] - want * phase).norm());
        }
    }
    worst
}

// ------------------------------------------------------------ cost formulas

/// CCZ gates for the rotations of one outermost layer of a `2ⁿ`-mode
/// transform under cascaded catalysis.
pub fn ccz_cost_rz(n: u32) -> u64 {
    (3..=n).map(|k| (1u64 << (k - 2)) - 1).sum()
}

/// CCZ gates for the `F₂` parts of one layer of `N` modes.
pub fn ccz_cost_f2(n: u32) -> u64 {
    (1u64 << n) / 2
}

/// Adjacent fermionic swaps for the three interleaves of one layer of `2ⁿ` modes.
pub fn fswap_interleave_cost(n: u32) -> u64 {
    if n < 2 {
        0
    } else {
        3 * ((1u64 << (2 * n - 3)) - (1u64 << (n - 2)))
    }
}

/// Clifford gates for the three interleaves of one layer of `2ⁿ` modes with
/// the dynamic encoding.
pub fn djw_interleave_cost(n: u32) -> u64 {
    match n {
        0 | 1 => 0,
        2 => 6,
        _ => 3 * ((1u64 << (n + 1)) - 6),
    }
}

/// Rotations `R_z(2πt)` are grouped up to Pauli factors: `t`, `-t` and
/// `t + 1/2` are equivalent. Returns the class representative as
/// `(num, den)` in lowest terms, or `None` for Clifford angles.
pub fn pauli_class(angle: &Angle) -> Result<Option<(u64, u64)>, FfftError> {
    let (num, den) = match *angle {
        Angle::Turns { num, den } if den.is_power_of_two() => (num.rem_euclid(den as i64) as u64, den),
        a => return Err(FfftError::NonDyadic(format!("{a:?}"))),
    };
    if (4 * num) % den == 0 {
        return Ok(None);
    }
    let half = den / 2;
    let r = num % half;
    let rep = r.min(half - r);
    let g = gcd(rep, den);
    Ok(Some((rep / g, den / g)))
}

fn gcd(mut a: u64, mut b: u64) -> u64 {
    while b != 0 {
        (a, b) = (b, a % b);
    }
    a
}

/// CCZ count of a catalysis cascade producing `angles`: each round pays one
/// CCZ per distinct non-Clifford class and passes the doubled angles on,
/// until only Cliffords remain.
pub fn catalysis_cascade_ccz(angles: &[Angle]) -> Result<u64, FfftError> {
    let mut set: BTreeSet<(u64, u64)> = BTreeSet::new();
    for a in angles {
        if let Some(c) = pauli_class(a)? {
            set.insert(c);
        }
    }
    let mut total = 0;
    while !set.is_empty() {
        total += set.len() as u64;
        let mut next = BTreeSet::new();
        for &(num, den) in &set {
            if let Some(c) = pauli_class(&Angle::turns(2 * num as i64, den))? {
                next.insert(c);
            }
        }
        set = next;
    }
    Ok(total)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CatalysisLevel {
    pub block: usize,
    pub blocks: usize,
    pub f2_ccz: u64,
    pub rz_ccz: u64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CatalysisReport {
    pub n_modes: usize,
    pub levels: Vec<CatalysisLevel>,
    pub f2_total: u64,
    pub rz_total: u64,
    pub total: u64,
    pub per_mode: f64,
}

/// CCZ counts of a full 1D transform, level by level. Each block runs its own
/// rotation cascade; the `F₂` parts cost half a CCZ per mode per level.
pub fn catalysis_report(plan: &FfftPlan) -> Result<CatalysisReport, FfftError> {
    let mut levels = Vec::new();
    for level in &plan.levels {
        let l = level.block.trailing_zeros();
        let first: Vec<Angle> = level.gates.iter().take(level.block / 2).map(FGate::angle).collect();
        let per_block = catalysis_cascade_ccz(&first)?;
        levels.push(CatalysisLevel {
            block: level.block,
            blocks: level.offsets.len(),
            f2_ccz: level.offsets.len() as u64 * ccz_cost_f2(l),
            rz_ccz: level.offsets.len() as u64 * per_block,
        });
    }
    let f2_total = levels.iter().map(|l| l.f2_ccz).sum();
    let rz_total = levels.iter().map(|l| l.rz_ccz).sum();
    let total = f2_total + rz_total;
    Ok(CatalysisReport {
        n_modes: plan.n_modes(),
        levels,
        f2_total,
        rz_total,
        total,
        per_mode: total as f64 / plan.n_modes() as f64,
    })
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CczRow {
    pub n_modes: u64,
    pub ccz: u64,
    pub per_mode: f64,
}

/// Rotation CCZ cost of one layer for `N = 2¹ … 2^{n_max}`.
pub fn ccz_table(n_max: u32) -> Vec<CczRow> {
    (1..=n_max)
        .map(|n| {
            let ccz = ccz_cost_rz(n);
            CczRow { n_modes: 1 << n, ccz, per_mode: ccz as f64 / (1u64 << n) as f64 }
        })
        .collect()
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct InterleaveRow {
    pub n_modes: u64,
    pub fswap_div3: u64,
    pub djw_div3: u64,
}

/// Interleave costs per interleave for `N = 2¹ … 2^{n_max}`.
pub fn interleave_table(n_max: u32) -> Vec<InterleaveRow> {
    (1..=n_max)
        .map(|n| InterleaveRow {
            n_modes: 1 << n,
            fswap_div3: fswap_interleave_cost(n) / 3,
            djw_div3: djw_interleave_cost(n) / 3,
        })
        .collect()
}

// ------------------------------------------------------ momentum pairings

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum MomentumPairing {
    /// `(k_y, k_x) → (k_y, -k_x)` on an `L × L` grid at `k_y·L + k_x`.
    KxNegate,
    /// `k → -k` on the grid.
    FullKNegate,
    /// `2L²` modes with spin fastest (`2k + s`) to spin-major order with the
    /// spin-down block at `-k`, so that `k↑` and `-k↓` share an offset.
    SpinSplit,
}

impl std::str::FromStr for MomentumPairing {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "kx_negate" | "kx-negate" => Ok(Self::KxNegate),
            "full_k_negate" | "full-k-negate" => Ok(Self::FullKNegate),
            "spin_split" | "spin-split" => Ok(Self::SpinSplit),
            _ => Err(format!("unknown pairing {s:?}")),
        }
    }
}

fn negate(k: usize, l: usize) -> usize {
    (l - k) % l
}

fn grid_map(l: usize, f: impl Fn(usize, usize) -> (usize, usize)) -> Permutation {
    let images = (0..l * l)
        .map(|i| {
            let (y, x) = f(i / l, i % l);
            y * l + x
        })
        .collect();
    Permutation::new(images).expect("grid map is a bijection")
}

/// Factors of the pairing permutation in application order. Each factor is a
/// row-wise reflection, a reflection of whole rows, or a riffle.
pub fn momentum_pairing_factors(l: usize, kind: MomentumPairing) -> Result<Vec<Permutation>, FfftError> {
    log2_exact(l)?;
    let kx = grid_map(l, |y, x| (y, negate(x, l)));
    let ky = grid_map(l, |y, x| (negate(y, l), x));
    Ok(match kind {
        MomentumPairing::KxNegate => vec![kx],
        MomentumPairing::FullKNegate => vec![kx, ky],
        MomentumPairing::SpinSplit => {
            let m = l * l;
            let unriffle = InterleavePerm::riffle(2 * m).p.inverse();
            let lower = |p: &Permutation| {
                let images = (0..2 * m).map(|i| if i < m { i } else { m + p.apply(i - m) }).collect();
                Permutation::new(images).expect("block sum is a bijection")
            };
            vec![unriffle, lower(&kx), lower(&ky)]
        }
    })
}

pub fn momentum_pairing_permutation(l: usize, kind: MomentumPairing) -> Result<Permutation, FfftError> {
    let factors = momentum_pairing_factors(l, kind)?;
    let mut p = Permutation::identity(factors[0].n());
    for f in &factors {
        p = f.compose(&p).map_err(PermError::from)?;
    }
    Ok(p)
}

/// Emits the factors of the pairing permutation one after another.
pub fn compile_momentum_pairing(l: usize, kind: MomentumPairing, opts: &CompileOptions) -> Result<CompiledCircuit, FfftError> {
    let factors = momentum_pairing_factors(l, kind)?;
    let n = factors[0].n();
    let mut b = CircuitBuilder::new(n);
    let qubits: Vec<usize> = (0..n).collect();
    let start = b.len();
    for f in &factors {
        emit_permutation(&mut b, &qubits, f, Strategy::Auto, opts);
        b.next_layer();
    }
    let total = momentum_pairing_permutation(l, kind)?;
    b.add_block(start, qubits, total.images().to_vec());
    Ok(b.finish())
}
