//! Jordan-Wigner orderings, Majorana Pauli strings and adjacent-gate encoding.

use std::collections::HashMap;
use std::fmt;
use std::sync::{OnceLock, RwLock};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::circuit_ir::{FermionicGate, GateKind, Instruction, Matrix4};
use crate::f2core::F2RowVector;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum JwError {
    #[error("not a bijection on 0..{n}: {detail}")]
    NotBijection { n: usize, detail: String },
    #[error("index {index} out of range for {n} modes")]
    OutOfRange { index: usize, n: usize },
    #[error("size mismatch: {0} vs {1}")]
    SizeMismatch(usize, usize),
    #[error("modes {0} and {1} are not adjacent in the encoding")]
    NotAdjacent(usize, usize),
    #[error("expected a {expected} gate")]
    WrongGateKind { expected: &'static str },
}

fn check_bijection(images: &[usize]) -> Result<(), JwError> {
    let n = images.len();
    let mut seen = vec![false; n];
    for &v in images {
        if v >= n {
            return Err(JwError::NotBijection { n, detail: format!("image {v} out of range") });
        }
        if std::mem::replace(&mut seen[v], true) {
            return Err(JwError::NotBijection { n, detail: format!("image {v} repeated") });
        }
    }
    Ok(())
}

/// Bijection on `0..n`; `p[i]` is the image of `i`.
#[derive(Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "Vec<usize>", into = "Vec<usize>")]
pub struct Permutation(Vec<usize>);

impl TryFrom<Vec<usize>> for Permutation {
    type Error = JwError;
    fn try_from(v: Vec<usize>) -> Result<Self, JwError> {
        Permutation::new(v)
    }
}

impl From<Permutation> for Vec<usize> {
    fn from(p: Permutation) -> Self {
        p.0
    }
}

impl Permutation {
    pub fn new(images: Vec<usize>) -> Result<Self, JwError> {
        check_bijection(&images)?;
        Ok(Self(images))
    }

    pub fn identity(n: usize) -> Self {
        Self((0..n).collect())
    }

    /// Parses a comma-separated image list such as `"3,1,0,2"`.
    pub fn parse(s: &str) -> Result<Self, JwError> {
        let images = s
            .split(',')
            .map(str::trim)
            .filter(|t| !t.is_empty())
            .map(|t| {
                t.parse::<usize>()
                    .map_err(|_| JwError::NotBijection { n: 0, detail: format!("`{t}` is not an index") })
            })
            .collect::<Result<Vec<_>, _>>()?;
        Self::new(images)
    }

    #[inline]
    pub fn n(&self) -> usize {
        self.0.len()
    }

    #[inline]
    pub fn apply(&self, i: usize) -> usize {
        self.0[i]
    }

    pub fn images(&self) -> &[usize] {
        &self.0
    }

    pub fn inverse(&self) -> Self {
        let mut inv = vec![0; self.0.len()];
        for (i, &v) in self.0.iter().enumerate() {
            inv[v] = i;
        }
        Self(inv)
    }

    /// `self ∘ other`: apply `other` first.
    pub fn compose(&self, other: &Permutation) -> Result<Self, JwError> {
        if self.n() != other.n() {
            return Err(JwError::SizeMismatch(self.n(), other.n()));
        }
        Ok(Self(other.0.iter().map(|&i| self.0[i]).collect()))
    }

    pub fn is_identity(&self) -> bool {
        self.0.iter().enumerate().all(|(i, &v)| i == v)
    }

    /// Pairs `a < b` with `p(a) > p(b)`.
    pub fn inversions(&self) -> usize {
        let n = self.n();
        (0..n).map(|a| ((a + 1)..n).filter(|&b| self.0[a] > self.0[b]).count()).sum()
    }

    /// Extends with fixed points up to size `n`.
    pub fn padded(&self, n: usize) -> Self {
        let mut v = self.0.clone();
        v.extend(self.n()..n.max(self.n()));
        Self(v)
    }
}

impl fmt::Debug for Permutation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Permutation{:?}", self.0)
    }
}

impl fmt::Display for Permutation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.0.iter().map(ToString::to_string).collect();
        f.write_str(&parts.join(","))
    }
}

/// Jordan-Wigner ordering: mode `i` sits on qubit `m[i]`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct OrderingMap {
    m: Vec<usize>,
    inv: Vec<usize>,
}

impl OrderingMap {
    pub fn new(m: Vec<usize>) -> Result<Self, JwError> {
        check_bijection(&m)?;
        let mut inv = vec![0; m.len()];
        for (i, &q) in m.iter().enumerate() {
            inv[q] = i;
        }
        Ok(Self { m, inv })
    }

    pub fn identity(n: usize) -> Self {
        Self { m: (0..n).collect(), inv: (0..n).collect() }
    }

    pub fn from_permutation(p: &Permutation) -> Self {
        Self::new(p.images().to_vec()).expect("permutations are bijections")
    }

    #[inline]
    pub fn n(&self) -> usize {
        self.m.len()
    }

    #[inline]
    pub fn qubit(&self, mode: usize) -> usize {
        self.m[mode]
    }

    #[inline]
    pub fn mode_at(&self, qubit: usize) -> usize {
        self.inv[qubit]
    }

    pub fn as_permutation(&self) -> Permutation {
        Permutation(self.m.clone())
    }

    /// The ordering reached by moving the content of qubit `q` to `p(q)`.
    pub fn after(&self, p: &Permutation) -> Result<Self, JwError> {
        Ok(Self::from_permutation(&p.compose(&self.as_permutation())?))
    }
}

/// The permutation `p = m1 ∘ m0⁻¹` carrying encoding `m0` to `m1`.
pub fn transition(m0: &OrderingMap, m1: &OrderingMap) -> Result<Permutation, JwError> {
    m1.as_permutation().compose(&m0.as_permutation().inverse())
}

/// Modes positioned strictly to the left of mode `i`.
pub fn left_set(m: &OrderingMap, i: usize) -> Result<Vec<usize>, JwError> {
    if i >= m.n() {
        return Err(JwError::OutOfRange { index: i, n: m.n() });
    }
    Ok((0..m.n()).filter(|&j| m.qubit(j) < m.qubit(i)).collect())
}

/// Signed Pauli word on `n` qubits.
///
/// Stored as `i^k · X^x Z^z` with every X placed left of its Z, so that
/// `Y = i·XZ` contributes one to `k`. Equality is therefore exact operator
/// equality.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct PauliString {
    pub(crate) x: F2RowVector,
    pub(crate) z: F2RowVector,
    pub(crate) k: u8,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum PauliAxis {
    X,
    Y,
    Z,
}

impl PauliString {
    pub fn identity(n: usize) -> Self {
        Self { x: F2RowVector::zeros(n), z: F2RowVector::zeros(n), k: 0 }
    }

    pub fn single(n: usize, q: usize, axis: PauliAxis) -> Self {
        let mut p = Self::identity(n);
        p.set_letter(q, Some(axis));
        p
    }

    /// Parses `"+XZIY"`, `"-iZZ"` and similar. Letters are in qubit order.
    pub fn parse(s: &str) -> Result<Self, String> {
        let (sign, body) = if let Some(r) = s.strip_prefix("+i") {
            (1, r)
        } else if let Some(r) = s.strip_prefix("-i") {
            (3, r)
        } else if let Some(r) = s.strip_prefix('+') {
            (0, r)
        } else if let Some(r) = s.strip_prefix('-') {
            (2, r)
        } else {
            (0, s)
        };
        let mut p = Self::identity(body.chars().count());
        for (q, c) in body.chars().enumerate() {
            let axis = match c {
                'I' | '1' | '_' => None,
                'X' => Some(PauliAxis::X),
                'Y' => Some(PauliAxis::Y),
                'Z' => Some(PauliAxis::Z),
                _ => return Err(format!("unexpected Pauli letter `{c}`")),
            };
            p.set_letter(q, axis);
        }
        p.mul_phase(sign);
        Ok(p)
    }

    #[inline]
    pub fn n(&self) -> usize {
        self.x.len()
    }

    /// Sets qubit `q` to a Hermitian letter, keeping the overall Hermitian sign.
    pub fn set_letter(&mut self, q: usize, axis: Option<PauliAxis>) {
        let was_y = self.x.get(q) && self.z.get(q);
        let (x, z) = match axis {
            None => (false, false),
            Some(PauliAxis::X) => (true, false),
            Some(PauliAxis::Y) => (true, true),
            Some(PauliAxis::Z) => (false, true),
        };
        self.x.set(q, x);
        self.z.set(q, z);
        let now_y = x && z;
        self.k = (self.k + u8::from(now_y) + 3 * u8::from(was_y)) & 3;
    }

    pub fn letter(&self, q: usize) -> Option<PauliAxis> {
        match (self.x.get(q), self.z.get(q)) {
            (false, false) => None,
            (true, false) => Some(PauliAxis::X),
            (true, true) => Some(PauliAxis::Y),
            (false, true) => Some(PauliAxis::Z),
        }
    }

    pub fn x_bits(&self) -> &F2RowVector {
        &self.x
    }

    pub fn z_bits(&self) -> &F2RowVector {
        &self.z
    }

    fn y_count(&self) -> usize {
        self.x.and(&self.z).weight()
    }

    /// Phase `i^s` in front of the Hermitian letters: 0 → +1, 1 → +i, 2 → −1, 3 → −i.
    pub fn sign_power(&self) -> u8 {
        ((self.k as usize + 4 - self.y_count() % 4) & 3) as u8
    }

    pub fn is_hermitian(&self) -> bool {
        self.sign_power() & 1 == 0
    }

    pub fn mul_phase(&mut self, power: u8) {
        self.k = (self.k + power) & 3;
    }

    pub fn negate(&mut self) {
        self.mul_phase(2);
    }

    pub fn weight(&self) -> usize {
        self.x.words().iter().zip(self.z.words()).map(|(a, b)| (a | b).count_ones() as usize).sum()
    }

    pub fn support(&self) -> Vec<usize> {
        (0..self.n()).filter(|&q| self.x.get(q) || self.z.get(q)).collect()
    }

    pub fn is_identity_letters(&self) -> bool {
        self.x.is_zero() && self.z.is_zero()
    }

    pub fn commutes_with(&self, other: &PauliString) -> bool {
        !(self.x.dot(&other.z) ^ self.z.dot(&other.x))
    }

    /// `self · other`.
    pub fn mul(&self, other: &PauliString) -> PauliString {
        let mut out = self.clone();
        out.mul_assign_right(other);
        out
    }

    /// `self ← self · other`.
    pub fn mul_assign_right(&mut self, other: &PauliString) {
        assert_eq!(self.n(), other.n(), "Pauli size mismatch");
        // Z^{z1} X^{x2} = (−1)^{z1·x2} X^{x2} Z^{z1}
        let flip = self.z.dot(&other.x);
        self.x.xor_assign(&other.x);
        self.z.xor_assign(&other.z);
        self.k = (self.k + other.k + 2 * u8::from(flip)) & 3;
    }

    /// Dense `2^n × 2^n` matrix; basis index bit `q` is qubit `q`.
    pub fn to_dense(&self) -> nalgebra::DMatrix<Complex64> {
        let n = self.n();
        assert!(n <= 14, "dense Pauli limited to 14 qubits");
        let dim = 1usize << n;
        let xm: usize = self.x.iter_ones().map(|q| 1 << q).sum();
        let zm: usize = self.z.iter_ones().map(|q| 1 << q).sum();
        let phase = i_pow(self.k);
        let mut m = nalgebra::DMatrix::zeros(dim, dim);
        // X^x Z^z |b> = (−1)^{z·b} |b ⊕ x>
        for b in 0..dim {
            let s = if (zm & b).count_ones() & 1 == 1 { -1.0 } else { 1.0 };
            m[(b ^ xm, b)] = phase * s;
        }
        m
    }

    /// `m += coeff · self` without forming the dense Pauli matrix.
    pub fn add_scaled_to(&self, coeff: Complex64, m: &mut nalgebra::DMatrix<Complex64>) {
        let dim = 1usize << self.n();
        assert_eq!(m.shape(), (dim, dim), "matrix does not match {} qubits", self.n());
        let xm: usize = self.x.iter_ones().map(|q| 1 << q).sum();
        let zm: usize = self.z.iter_ones().map(|q| 1 << q).sum();
        let c = coeff * i_pow(self.k);
        for b in 0..dim {
            let v = if (zm & b).count_ones() & 1 == 1 { -c } else { c };
            m[(b ^ xm, b)] += v;
        }
    }
}

pub(crate) fn i_pow(k: u8) -> Complex64 {
    match k & 3 {
        0 => Complex64::new(1.0, 0.0),
        1 => Complex64::new(0.0, 1.0),
        2 => Complex64::new(-1.0, 0.0),
        _ => Complex64::new(0.0, -1.0),
    }
}

impl fmt::Display for PauliString {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(["+", "+i", "-", "-i"][self.sign_power() as usize])?;
        for q in 0..self.n() {
            f.write_str(match self.letter(q) {
                None => "I",
                Some(PauliAxis::X) => "X",
                Some(PauliAxis::Y) => "Y",
                Some(PauliAxis::Z) => "Z",
            })?;
        }
        Ok(())
    }
}

impl fmt::Debug for PauliString {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

impl Serialize for PauliString {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}

/// Majorana `χ_mu` under ordering `m`: X (even) or Y (odd) on `m(mu/2)`,
/// Z on every qubit to its left.
pub fn jw_majorana(m: &OrderingMap, mu: usize) -> PauliString {
    jw_majorana_on(m, mu, m.n())
}

/// As [`jw_majorana`] on a register of `n_qubits ≥ m.n()` qubits.
pub fn jw_majorana_on(m: &OrderingMap, mu: usize, n_qubits: usize) -> PauliString {
    assert!(mu < 2 * m.n(), "Majorana index {mu} out of range");
    let q = m.qubit(mu / 2);
    let mut p = PauliString::identity(n_qubits);
    for j in 0..q {
        p.z.set(j, true);
    }
    p.set_letter(q, Some(if mu % 2 == 0 { PauliAxis::X } else { PauliAxis::Y }));
    p
}

/// Pauli weight of the encoded hopping `c_i† c_j`: `|m(j) − m(i)| + 1`.
pub fn operator_weight(m: &OrderingMap, i: usize, j: usize) -> Result<usize, JwError> {
    for idx in [i, j] {
        if idx >= m.n() {
            return Err(JwError::OutOfRange { index: idx, n: m.n() });
        }
    }
    Ok(m.qubit(i).abs_diff(m.qubit(j)) + 1)
}

type TunnelKey = [u64; 4];

fn tunnel_cache() -> &'static RwLock<HashMap<TunnelKey, Matrix4>> {
    static CACHE: OnceLock<RwLock<HashMap<TunnelKey, Matrix4>>> = OnceLock::new();
    CACHE.get_or_init(|| RwLock::new(HashMap::new()))
}

/// Two-qubit matrix of `exp[−i(α c_0†c_1 + β c_0†c_1† + h.c.)]` for modes on
/// adjacent qubits, mode 0 on the lower qubit. Matrix index is `b0 + 2·b1`.
pub fn tunneling_matrix(alpha: Complex64, beta: Complex64) -> Matrix4 {
    let key = [alpha.re.to_bits(), alpha.im.to_bits(), beta.re.to_bits(), beta.im.to_bits()];
    if let Some(m) = tunnel_cache().read().expect("cache poisoned").get(&key) {
        return *m;
    }
    let m = crate::verify::fock::two_mode_tunneling(alpha, beta);
    tunnel_cache().write().expect("cache poisoned").insert(key, m);
    m
}

/// Encodes an adjacent tunneling gate as one two-qubit unitary.
pub fn encode_tunneling(m: &OrderingMap, g: &FermionicGate) -> Result<Instruction, JwError> {
    let GateKind::Tunneling { alpha, beta } = g.kind else {
        return Err(JwError::WrongGateKind { expected: "tunneling" });
    };
    let (i, j) = (g.modes[0], g.modes[1]);
    let (qi, qj) = (m.qubit(i), m.qubit(j));
    if qi.abs_diff(qj) != 1 {
        return Err(JwError::NotAdjacent(i, j));
    }
    // Rewrite the generator with the lower qubit first: α c_i†c_j = (ᾱ c_j†c_i)†
    // and c_i†c_j† = −c_j†c_i†.
    let (lo_alpha, lo_beta) = if qi < qj { (alpha, beta) } else { (alpha.conj(), -beta) };
    let (q0, q1) = if qi < qj { (qi, qj) } else { (qj, qi) };
    let matrix = tunneling_matrix(lo_alpha, lo_beta);
    Ok(Instruction::unitary2(q0, q1, matrix, "tunneling"))
}

/// Encodes a density-density interaction as a diagonal two-qubit unitary.
pub fn encode_interaction(m: &OrderingMap, g: &FermionicGate) -> Result<Instruction, JwError> {
    let GateKind::Interaction { gamma, delta_i, delta_j } = g.kind else {
        return Err(JwError::WrongGateKind { expected: "interaction" });
    };
    let (qi, qj) = (m.qubit(g.modes[0]), m.qubit(g.modes[1]));
    let mut matrix = [[Complex64::new(0.0, 0.0); 4]; 4];
    for (idx, row) in matrix.iter_mut().enumerate() {
        let ni = (idx & 1) as f64;
        let nj = (idx >> 1) as f64;
        let phase = gamma * ni * nj + delta_i * ni + delta_j * nj;
        row[idx] = Complex64::from_polar(1.0, -phase);
    }
    Ok(Instruction::unitary2(qi, qj, matrix, "interaction"))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn left_sets() {
        let id = OrderingMap::identity(4);
        assert!(left_set(&id, 0).unwrap().is_empty());
        assert_eq!(left_set(&id, 3).unwrap(), vec![0, 1, 2]);
        let rev = OrderingMap::new(vec![3, 2, 1, 0]).unwrap();
        assert_eq!(left_set(&rev, 0).unwrap(), vec![1, 2, 3]);
        assert!(left_set(&id, 4).is_err());
    }

    #[test]
    fn majorana_strings() {
        assert_eq!(jw_majorana(&OrderingMap::identity(1), 0).to_string(), "+X");
        assert_eq!(jw_majorana(&OrderingMap::identity(3), 5).to_string(), "+ZZY");
        let m = OrderingMap::new(vec![2, 0, 1]).unwrap();
        assert_eq!(jw_majorana(&m, 0).to_string(), "+ZZX");
        assert_eq!(jw_majorana(&m, 3).to_string(), "+YII");
    }

    #[test]
    fn pauli_algebra() {
        let x = PauliString::parse("X").unwrap();
        let y = PauliString::parse("Y").unwrap();
        let z = PauliString::parse("Z").unwrap();
        assert_eq!(x.mul(&y).to_string(), "+iZ");
        assert_eq!(y.mul(&x).to_string(), "-iZ");
        assert_eq!(z.mul(&x).to_string(), "+iY");
        assert_eq!(y.mul(&y).to_string(), "+I");
        assert!(!x.commutes_with(&z));
        assert_eq!(PauliString::parse("-iXZIY").unwrap().to_string(), "-iXZIY");
    }

    #[test]
    fn permutation_algebra() {
        let p = Permutation::parse("2,0,1").unwrap();
        let q = Permutation::parse("1,0,2").unwrap();
        assert_eq!(p.compose(&q).unwrap().images(), &[0, 2, 1]);
        assert!(p.compose(&p.inverse()).unwrap().is_identity());
        assert!(Permutation::parse("0,1,1").is_err());
        assert_eq!(Permutation::parse("3,2,1,0").unwrap().inversions(), 6);
    }

    #[test]
    fn weights() {
        let id = OrderingMap::identity(6);
        assert_eq!(operator_weight(&id, 0, 5).unwrap(), 6);
        assert_eq!(operator_weight(&id, 2, 3).unwrap(), 2);
    }
}
