//! Dense linear algebra over GF(2) and quadratic phase polynomials.
//!
//! Rows are packed into `u64` words, column `j` of a row living in bit
//! `j % 64` of word `j / 64`. Padding bits past `cols` are always zero so
//! word-level equality is logical equality.

use std::cmp::Ordering;
use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum F2Error {
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),
    #[error("matrix is singular over GF(2)")]
    Singular,
    #[error("linear system has no solution")]
    Infeasible,
    #[error("malformed matrix encoding: {0}")]
    Malformed(String),
}

#[inline]
fn words_for(bits: usize) -> usize {
    bits.div_ceil(64)
}

/// Bit vector over GF(2).
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct F2RowVector {
    len: usize,
    words: Vec<u64>,
}

impl F2RowVector {
    pub fn zeros(len: usize) -> Self {
        Self { len, words: vec![0; words_for(len)] }
    }

    pub fn from_bits(bits: &[bool]) -> Self {
        let mut v = Self::zeros(bits.len());
        for (i, &b) in bits.iter().enumerate() {
            if b {
                v.set(i, true);
            }
        }
        v
    }

    pub fn from_indices(len: usize, ones: impl IntoIterator<Item = usize>) -> Self {
        let mut v = Self::zeros(len);
        for i in ones {
            v.toggle(i);
        }
        v
    }

    pub fn unit(len: usize, i: usize) -> Self {
        Self::from_indices(len, [i])
    }

    #[inline]
    pub fn len(&self) -> usize {
        self.len
    }

    #[inline]
    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    #[inline]
    pub fn get(&self, i: usize) -> bool {
        debug_assert!(i < self.len);
        (self.words[i >> 6] >> (i & 63)) & 1 == 1
    }

    #[inline]
    pub fn set(&mut self, i: usize, value: bool) {
        debug_assert!(i < self.len);
        let mask = 1u64 << (i & 63);
        if value {
            self.words[i >> 6] |= mask;
        } else {
            self.words[i >> 6] &= !mask;
        }
    }

    #[inline]
    pub fn toggle(&mut self, i: usize) {
        debug_assert!(i < self.len);
        self.words[i >> 6] ^= 1u64 << (i & 63);
    }

    /// Grows (zero fill) or truncates to `len` bits.
    pub fn resize(&mut self, len: usize) {
        self.words.resize(words_for(len), 0);
        self.len = len;
        self.clear_padding();
    }

    fn clear_padding(&mut self) {
        let r = self.len & 63;
        if r != 0 {
            if let Some(w) = self.words.last_mut() {
                *w &= (1u64 << r) - 1;
            }
        }
    }

    #[inline]
    pub fn words(&self) -> &[u64] {
        &self.words
    }

    /// In-place XOR. Panics on length mismatch.
    #[inline]
    pub fn xor_assign(&mut self, other: &F2RowVector) {
        assert_eq!(self.len, other.len, "F2RowVector length mismatch");
        for (a, b) in self.words.iter_mut().zip(&other.words) {
            *a ^= *b;
        }
    }

    pub fn xor(&self, other: &F2RowVector) -> F2RowVector {
        let mut out = self.clone();
        out.xor_assign(other);
        out
    }

    pub fn and(&self, other: &F2RowVector) -> F2RowVector {
        assert_eq!(self.len, other.len, "F2RowVector length mismatch");
        F2RowVector {
            len: self.len,
            words: self.words.iter().zip(&other.words).map(|(a, b)| a & b).collect(),
        }
    }

    /// Inner product mod 2.
    pub fn dot(&self, other: &F2RowVector) -> bool {
        assert_eq!(self.len, other.len, "F2RowVector length mismatch");
        self.words
            .iter()
            .zip(&other.words)
            .fold(0u32, |acc, (a, b)| acc ^ (a & b).count_ones())
            & 1
            == 1
    }

    pub fn weight(&self) -> usize {
        self.words.iter().map(|w| w.count_ones() as usize).sum()
    }

    pub fn is_zero(&self) -> bool {
        self.words.iter().all(|&w| w == 0)
    }

    pub fn iter_ones(&self) -> impl Iterator<Item = usize> + '_ {
        self.words.iter().enumerate().flat_map(|(wi, &w)| {
            let mut w = w;
            std::iter::from_fn(move || {
                if w == 0 {
                    None
                } else {
                    let t = w.trailing_zeros() as usize;
                    w &= w - 1;
                    Some(wi * 64 + t)
                }
            })
        })
    }

    pub fn support(&self) -> Vec<usize> {
        self.iter_ones().collect()
    }

    /// Restriction to the listed coordinates, in list order.
    pub fn select(&self, idx: &[usize]) -> F2RowVector {
        let mut out = F2RowVector::zeros(idx.len());
        for (k, &i) in idx.iter().enumerate() {
            if self.get(i) {
                out.set(k, true);
            }
        }
        out
    }

    /// Compare by weight, then lexicographically by sorted support.
    pub fn cmp_weight_then_support(&self, other: &F2RowVector) -> Ordering {
        self.weight()
            .cmp(&other.weight())
            .then_with(|| self.iter_ones().cmp(other.iter_ones()))
    }

    fn to_hex(&self) -> String {
        let digits = self.len.div_ceil(4);
        (0..digits)
            .map(|d| {
                let mut nib = 0u32;
                for b in 0..4 {
                    let i = 4 * d + b;
                    if i < self.len && self.get(i) {
                        nib |= 1 << b;
                    }
                }
                char::from_digit(nib, 16).unwrap()
            })
            .collect()
    }

    fn from_hex(len: usize, s: &str) -> Result<Self, F2Error> {
        if s.len() != len.div_ceil(4) {
            return Err(F2Error::Malformed(format!("row `{s}` has wrong length for {len} columns")));
        }
        let mut v = F2RowVector::zeros(len);
        for (d, ch) in s.chars().enumerate() {
            let nib = ch
                .to_digit(16)
                .ok_or_else(|| F2Error::Malformed(format!("bad hex digit `{ch}`")))?;
            for b in 0..4 {
                if nib >> b & 1 == 1 {
                    let i = 4 * d + b;
                    if i >= len {
                        return Err(F2Error::Malformed("bit set past row length".into()));
                    }
                    v.set(i, true);
                }
            }
        }
        Ok(v)
    }
}

impl fmt::Debug for F2RowVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

impl fmt::Display for F2RowVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for i in 0..self.len {
            f.write_str(if self.get(i) { "1" } else { "0" })?;
        }
        Ok(())
    }
}

/// Dense GF(2) matrix, row-major.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct F2Matrix {
    rows: usize,
    cols: usize,
    data: Vec<F2RowVector>,
}

impl F2Matrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self { rows, cols, data: vec![F2RowVector::zeros(cols); rows] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m.set(i, i, true);
        }
        m
    }

    pub fn from_fn(rows: usize, cols: usize, f: impl Fn(usize, usize) -> bool) -> Self {
        let mut m = Self::zeros(rows, cols);
        for i in 0..rows {
            for j in 0..cols {
                if f(i, j) {
                    m.set(i, j, true);
                }
            }
        }
        m
    }

    pub fn from_rows(rows: Vec<F2RowVector>, cols: usize) -> Result<Self, F2Error> {
        if let Some(r) = rows.iter().find(|r| r.len() != cols) {
            return Err(F2Error::DimensionMismatch(format!(
                "row of length {} in matrix with {cols} columns",
                r.len()
            )));
        }
        Ok(Self { rows: rows.len(), cols, data: rows })
    }

    /// Parses rows of `0`/`1` characters; whitespace is ignored.
    pub fn parse(rows: &[&str]) -> Result<Self, F2Error> {
        let parsed: Vec<Vec<bool>> = rows
            .iter()
            .map(|r| {
                r.chars()
                    .filter(|c| !c.is_whitespace())
                    .map(|c| match c {
                        '0' => Ok(false),
                        '1' => Ok(true),
                        _ => Err(F2Error::Malformed(format!("unexpected `{c}`"))),
                    })
                    .collect()
            })
            .collect::<Result<_, _>>()?;
        let cols = parsed.first().map_or(0, Vec::len);
        Self::from_rows(parsed.iter().map(|r| F2RowVector::from_bits(r)).collect(), cols)
    }

    #[inline]
    pub fn rows(&self) -> usize {
        self.rows
    }

    #[inline]
    pub fn cols(&self) -> usize {
        self.cols
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> bool {
        self.data[i].get(j)
    }

    #[inline]
    pub fn set(&mut self, i: usize, j: usize, value: bool) {
        self.data[i].set(j, value)
    }

    #[inline]
    pub fn toggle(&mut self, i: usize, j: usize) {
        self.data[i].toggle(j)
    }

    #[inline]
    pub fn row(&self, i: usize) -> &F2RowVector {
        &self.data[i]
    }

    pub fn row_mut(&mut self, i: usize) -> &mut F2RowVector {
        &mut self.data[i]
    }

    pub fn column(&self, j: usize) -> F2RowVector {
        F2RowVector::from_bits(&(0..self.rows).map(|i| self.get(i, j)).collect::<Vec<_>>())
    }

    /// Row `dst` ^= row `src`.
    pub fn add_row(&mut self, src: usize, dst: usize) {
        assert_ne!(src, dst);
        let (a, b) = if src < dst {
            let (lo, hi) = self.data.split_at_mut(dst);
            (&lo[src], &mut hi[0])
        } else {
            let (lo, hi) = self.data.split_at_mut(src);
            (&hi[0], &mut lo[dst])
        };
        b.xor_assign(a);
    }

    pub fn swap_rows(&mut self, a: usize, b: usize) {
        self.data.swap(a, b);
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(F2RowVector::is_zero)
    }

    pub fn count_ones(&self) -> usize {
        self.data.iter().map(F2RowVector::weight).sum()
    }

    pub fn transpose(&self) -> F2Matrix {
        let mut t = F2Matrix::zeros(self.cols, self.rows);
        for (i, r) in self.data.iter().enumerate() {
            for j in r.iter_ones() {
                t.set(j, i, true);
            }
        }
        t
    }

    pub fn is_symmetric(&self) -> bool {
        self.rows == self.cols && *self == self.transpose()
    }

    /// Submatrix with the listed rows and columns, in list order.
    pub fn select(&self, rows: &[usize], cols: &[usize]) -> F2Matrix {
        F2Matrix {
            rows: rows.len(),
            cols: cols.len(),
            data: rows.iter().map(|&i| self.data[i].select(cols)).collect(),
        }
    }

    /// `M x` for a column vector `x`.
    pub fn mul_vec(&self, x: &F2RowVector) -> Result<F2RowVector, F2Error> {
        if x.len() != self.cols {
            return Err(F2Error::DimensionMismatch(format!(
                "{}x{} matrix times vector of length {}",
                self.rows,
                self.cols,
                x.len()
            )));
        }
        Ok(F2RowVector::from_bits(&self.data.iter().map(|r| r.dot(x)).collect::<Vec<_>>()))
    }

    /// `xᵀ M` for a row vector `x`.
    pub fn vec_mul(&self, x: &F2RowVector) -> Result<F2RowVector, F2Error> {
        if x.len() != self.rows {
            return Err(F2Error::DimensionMismatch(format!(
                "vector of length {} times {}x{} matrix",
                x.len(),
                self.rows,
                self.cols
            )));
        }
        let mut out = F2RowVector::zeros(self.cols);
        for i in x.iter_ones() {
            out.xor_assign(&self.data[i]);
        }
        Ok(out)
    }

    pub fn rank(&self) -> usize {
        let mut m = self.clone();
        m.row_reduce().len()
    }

    /// Reduces in place to reduced row echelon form and returns pivot columns.
    fn row_reduce(&mut self) -> Vec<usize> {
        let mut pivots = Vec::new();
        let mut r = 0;
        for c in 0..self.cols {
            if r == self.rows {
                break;
            }
            let Some(p) = (r..self.rows).find(|&i| self.get(i, c)) else {
                continue;
            };
            self.swap_rows(r, p);
            for i in 0..self.rows {
                if i != r && self.get(i, c) {
                    self.add_row(r, i);
                }
            }
            pivots.push(c);
            r += 1;
        }
        pivots
    }

    pub fn inverse(&self) -> Result<F2Matrix, F2Error> {
        if self.rows != self.cols {
            return Err(F2Error::DimensionMismatch(format!(
                "inverse of non-square {}x{} matrix",
                self.rows, self.cols
            )));
        }
        let n = self.rows;
        let mut a = self.clone();
        let mut inv = F2Matrix::identity(n);
        for c in 0..n {
            let p = (c..n).find(|&i| a.get(i, c)).ok_or(F2Error::Singular)?;
            a.swap_rows(c, p);
            inv.swap_rows(c, p);
            for i in 0..n {
                if i != c && a.get(i, c) {
                    a.add_row(c, i);
                    inv.add_row(c, i);
                }
            }
        }
        Ok(inv)
    }

    pub fn is_invertible(&self) -> bool {
        self.rows == self.cols && self.rank() == self.rows
    }
}

impl fmt::Debug for F2Matrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "F2Matrix {}x{}", self.rows, self.cols)?;
        for r in &self.data {
            writeln!(f, "  {r}")?;
        }
        Ok(())
    }
}

#[derive(Serialize, Deserialize)]
struct F2MatrixJson {
    rows: usize,
    cols: usize,
    data: Vec<String>,
}

impl Serialize for F2Matrix {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        F2MatrixJson {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(F2RowVector::to_hex).collect(),
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for F2Matrix {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let j = F2MatrixJson::deserialize(d)?;
        if j.data.len() != j.rows {
            return Err(serde::de::Error::custom("row count does not match `rows`"));
        }
        let data = j
            .data
            .iter()
            .map(|s| F2RowVector::from_hex(j.cols, s))
            .collect::<Result<Vec<_>, _>>()
            .map_err(serde::de::Error::custom)?;
        Ok(F2Matrix { rows: j.rows, cols: j.cols, data })
    }
}

pub fn mat_mul(a: &F2Matrix, b: &F2Matrix) -> Result<F2Matrix, F2Error> {
    if a.cols != b.rows {
        return Err(F2Error::DimensionMismatch(format!(
            "{}x{} times {}x{}",
            a.rows, a.cols, b.rows, b.cols
        )));
    }
    let data = a
        .data
        .iter()
        .map(|r| {
            let mut out = F2RowVector::zeros(b.cols);
            for k in r.iter_ones() {
                out.xor_assign(&b.data[k]);
            }
            out
        })
        .collect();
    Ok(F2Matrix { rows: a.rows, cols: b.cols, data })
}

/// Kronecker product; row `(i, k)` of the result is `i * b.rows + k`.
pub fn kron(a: &F2Matrix, b: &F2Matrix) -> F2Matrix {
    let mut out = F2Matrix::zeros(a.rows * b.rows, a.cols * b.cols);
    for i in 0..a.rows {
        for j in a.data[i].iter_ones() {
            for k in 0..b.rows {
                for l in b.data[k].iter_ones() {
                    out.set(i * b.rows + k, j * b.cols + l, true);
                }
            }
        }
    }
    out
}

/// Strictly lower-triangular all-ones matrix: `L[i][j] = 1` iff `i > j`.
pub fn lower_triangular_ones(n: usize) -> F2Matrix {
    F2Matrix::from_fn(n, n, |i, j| i > j)
}

/// Invertible GF(2) matrix describing a CNOT circuit, `|x> -> |Px>`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CnotMatrix(F2Matrix);

impl CnotMatrix {
    pub fn new(p: F2Matrix) -> Result<Self, F2Error> {
        if p.rows() != p.cols() {
            return Err(F2Error::DimensionMismatch(format!(
                "CNOT matrix must be square, got {}x{}",
                p.rows(),
                p.cols()
            )));
        }
        if !p.is_invertible() {
            return Err(F2Error::Singular);
        }
        Ok(Self(p))
    }

    pub fn identity(n: usize) -> Self {
        Self(F2Matrix::identity(n))
    }

    /// Matrix of a CNOT sequence applied left to right; `(c, t)` adds bit `c` into bit `t`.
    pub fn from_cnots(n: usize, cnots: &[(usize, usize)]) -> Self {
        let mut p = F2Matrix::identity(n);
        for &(c, t) in cnots {
            p.add_row(c, t);
        }
        Self(p)
    }

    pub fn n(&self) -> usize {
        self.0.rows()
    }

    pub fn matrix(&self) -> &F2Matrix {
        &self.0
    }

    pub fn inverse(&self) -> Self {
        Self(self.0.inverse().expect("CnotMatrix is invertible by construction"))
    }

    pub fn apply(&self, x: &F2RowVector) -> Result<F2RowVector, F2Error> {
        self.0.mul_vec(x)
    }
}

/// Diagonal Clifford `C_Z(A)`: CZ on every set pair plus Z on every zmask bit.
///
/// The phase on `|x>` is `(-1)^f(x)` with
/// `f(x) = sum_{i<j} pairs[i][j] x_i x_j + sum_i zmask[i] x_i`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CzSpec {
    n: usize,
    pairs: F2Matrix,
    zmask: F2RowVector,
}

impl Serialize for F2RowVector {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        (self.len, self.to_hex()).serialize(s)
    }
}

impl<'de> Deserialize<'de> for F2RowVector {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let (len, hex) = <(usize, String)>::deserialize(d)?;
        F2RowVector::from_hex(len, &hex).map_err(serde::de::Error::custom)
    }
}

impl CzSpec {
    pub fn empty(n: usize) -> Self {
        Self { n, pairs: F2Matrix::zeros(n, n), zmask: F2RowVector::zeros(n) }
    }

    pub fn from_parts(pairs: F2Matrix, zmask: F2RowVector) -> Result<Self, F2Error> {
        let n = pairs.rows();
        if pairs.cols() != n || zmask.len() != n {
            return Err(F2Error::DimensionMismatch("pairs must be n x n and zmask length n".into()));
        }
        if !pairs.is_symmetric() || (0..n).any(|i| pairs.get(i, i)) {
            return Err(F2Error::Malformed("pairs must be symmetric with zero diagonal".into()));
        }
        Ok(Self { n, pairs, zmask })
    }

    /// `C_Z((B + Bᵀ)/2)`: the off-diagonal symmetrization of `b`; its diagonal is dropped.
    pub fn from_symmetrized(b: &F2Matrix) -> Result<Self, F2Error> {
        let n = b.rows();
        if b.cols() != n {
            return Err(F2Error::DimensionMismatch("expected a square matrix".into()));
        }
        let mut s = Self::empty(n);
        for i in 0..n {
            for j in b.row(i).iter_ones() {
                if i != j {
                    s.toggle_cz(i, j);
                }
            }
        }
        Ok(s)
    }

    pub fn from_cz_list(n: usize, czs: impl IntoIterator<Item = (usize, usize)>) -> Self {
        let mut s = Self::empty(n);
        for (i, j) in czs {
            s.toggle_cz(i, j);
        }
        s
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn pairs(&self) -> &F2Matrix {
        &self.pairs
    }

    pub fn zmask(&self) -> &F2RowVector {
        &self.zmask
    }

    pub fn toggle_cz(&mut self, i: usize, j: usize) {
        assert_ne!(i, j, "CZ needs two distinct qubits");
        self.pairs.toggle(i, j);
        self.pairs.toggle(j, i);
    }

    pub fn toggle_z(&mut self, i: usize) {
        self.zmask.toggle(i);
    }

    pub fn has_cz(&self, i: usize, j: usize) -> bool {
        self.pairs.get(i, j)
    }

    /// Unordered CZ pairs `(i, j)` with `i < j`, sorted.
    pub fn cz_pairs(&self) -> Vec<(usize, usize)> {
        (0..self.n)
            .flat_map(|i| self.pairs.row(i).iter_ones().filter(move |&j| j > i).map(move |j| (i, j)))
            .collect()
    }

    pub fn cz_count(&self) -> usize {
        self.pairs.count_ones() / 2
    }

    pub fn is_empty(&self) -> bool {
        self.pairs.is_zero() && self.zmask.is_zero()
    }

    /// Phase exponent `f(x)` mod 2.
    pub fn phase(&self, x: &F2RowVector) -> bool {
        let mut f = self.zmask.dot(x);
        for i in x.iter_ones() {
            // Each unordered pair is seen from its smaller end.
            f ^= self.pairs.row(i).iter_ones().filter(|&j| j > i && x.get(j)).count() & 1 == 1;
        }
        f
    }

    /// Product of two diagonal circuits; entrywise XOR.
    pub fn compose(&self, other: &CzSpec) -> Result<CzSpec, F2Error> {
        if self.n != other.n {
            return Err(F2Error::DimensionMismatch(format!("CzSpec sizes {} and {}", self.n, other.n)));
        }
        let mut out = self.clone();
        for i in 0..self.n {
            out.pairs.row_mut(i).xor_assign(other.pairs.row(i));
        }
        out.zmask.xor_assign(&other.zmask);
        Ok(out)
    }
}

/// `C_X(P)† C_Z(A) C_X(P)` as a diagonal circuit: `f'(x) = f_A(Px)`.
pub fn conjugate_cz(a: &CzSpec, p: &CnotMatrix) -> Result<CzSpec, F2Error> {
    let n = a.n;
    if p.n() != n {
        return Err(F2Error::DimensionMismatch(format!("CzSpec on {n} qubits, CNOT matrix on {}", p.n())));
    }
    let pm = p.matrix();
    // f_A(y) = yᵀ U y + z·y with U the strict upper triangle of `pairs`.
    let upper = F2Matrix::from_fn(n, n, |i, j| j > i && a.pairs.get(i, j));
    let m = mat_mul(&pm.transpose(), &mat_mul(&upper, pm)?)?;
    let mut out = CzSpec::empty(n);
    for k in 0..n {
        for l in (k + 1)..n {
            if m.get(k, l) ^ m.get(l, k) {
                out.toggle_cz(k, l);
            }
        }
    }
    let zt = pm.vec_mul(&a.zmask)?;
    for k in 0..n {
        if m.get(k, k) ^ zt.get(k) {
            out.toggle_z(k);
        }
    }
    Ok(out)
}

/// Finds `x` with `x · pc == b` on `relevant_columns`, of small Hamming weight.
///
/// `b` is indexed like `relevant_columns`. When the solution coset has at most
/// `exact_threshold` free variables the result has globally minimal weight,
/// ties broken by lexicographically smallest support. Otherwise the
/// particular solution is improved by greedy single and pair flips of the
/// nullspace basis.
pub fn min_weight_row_solve(
    pc: &F2Matrix,
    b: &F2RowVector,
    relevant_columns: &[usize],
    exact_threshold: usize,
) -> Result<F2RowVector, F2Error> {
    if b.len() != relevant_columns.len() {
        return Err(F2Error::DimensionMismatch(format!(
            "target has {} bits for {} relevant columns",
            b.len(),
            relevant_columns.len()
        )));
    }
    if let Some(&c) = relevant_columns.iter().find(|&&c| c >= pc.cols()) {
        return Err(F2Error::DimensionMismatch(format!("column {c} out of range for {} columns", pc.cols())));
    }
    let r = pc.rows();
    let k = relevant_columns.len();
    // Augmented system Mᵀ x = bᵀ: one equation per relevant column.
    let mut eq = F2Matrix::zeros(k, r + 1);
    for i in 0..r {
        for (e, &c) in relevant_columns.iter().enumerate() {
            if pc.get(i, c) {
                eq.set(e, i, true);
            }
        }
    }
    for e in b.iter_ones() {
        eq.set(e, r, true);
    }
    let pivots = eq.row_reduce();
    if pivots.last() == Some(&r) {
        return Err(F2Error::Infeasible);
    }
    let mut particular = F2RowVector::zeros(r);
    for (row, &c) in pivots.iter().enumerate() {
        if eq.get(row, r) {
            particular.set(c, true);
        }
    }
    let is_pivot = {
        let mut v = vec![false; r];
        for &c in &pivots {
            v[c] = true;
        }
        v
    };
    let free: Vec<usize> = (0..r).filter(|&c| !is_pivot[c]).collect();
    let basis: Vec<F2RowVector> = free
        .iter()
        .map(|&f| {
            let mut v = F2RowVector::unit(r, f);
            for (row, &c) in pivots.iter().enumerate() {
                if eq.get(row, f) {
                    v.set(c, true);
                }
            }
            v
        })
        .collect();

    if basis.len() <= exact_threshold {
        Ok(exact_coset_minimum(&particular, &basis))
    } else {
        Ok(greedy_coset_descent(particular, &basis))
    }
}

/// Exhaustive search over the coset ordered by the number of basis vectors
/// used. Each basis vector owns a distinct free coordinate, so a combination
/// of `s` vectors has weight at least `s` and the search stops once `s`
/// exceeds the best weight found.
fn exact_coset_minimum(particular: &F2RowVector, basis: &[F2RowVector]) -> F2RowVector {
    let d = basis.len();
    let mut best = particular.clone();
    let mut combo: Vec<usize> = Vec::with_capacity(d);
    for s in 1..=d {
        if s > best.weight() {
            break;
        }
        combo.clear();
        combo.extend(0..s);
        loop {
            let mut v = particular.clone();
            for &i in &combo {
                v.xor_assign(&basis[i]);
            }
            if v.cmp_weight_then_support(&best) == Ordering::Less {
                best = v;
            }
            // Next s-subset in lexicographic order.
            let mut i = s;
            while i > 0 && combo[i - 1] == d - s + i - 1 {
                i -= 1;
            }
            if i == 0 {
                break;
            }
            combo[i - 1] += 1;
            for j in i..s {
                combo[j] = combo[j - 1] + 1;
            }
        }
    }
    best
}

fn greedy_coset_descent(mut x: F2RowVector, basis: &[F2RowVector]) -> F2RowVector {
    loop {
        let mut improved = false;
        for v in basis {
            let y = x.xor(v);
            if y.cmp_weight_then_support(&x) == Ordering::Less {
                x = y;
                improved = true;
            }
        }
        if !improved {
            for i in 0..basis.len() {
                for j in (i + 1)..basis.len() {
                    let mut y = x.xor(&basis[i]);
                    y.xor_assign(&basis[j]);
                    if y.cmp_weight_then_support(&x) == Ordering::Less {
                        x = y;
                        improved = true;
                    }
                }
            }
        }
        if !improved {
            return x;
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn cnot_left_multiplication_adds_rows() {
        let p = F2Matrix::parse(&["110", "011", "101"]).unwrap();
        let q = CnotMatrix::from_cnots(3, &[(0, 2)]);
        let got = mat_mul(q.matrix(), &p).unwrap();
        let mut want = p.clone();
        want.add_row(0, 2);
        assert_eq!(got, want);
    }

    #[test]
    fn kron_of_two_lower_triangles() {
        let l2 = lower_triangular_ones(2);
        let k = kron(&l2, &l2);
        assert_eq!(k.count_ones(), 1);
        assert!(k.get(3, 0));
    }

    #[test]
    fn lower_triangle_three() {
        let l = lower_triangular_ones(3);
        let ones: Vec<_> = (0..3).flat_map(|i| (0..3).map(move |j| (i, j))).filter(|&(i, j)| l.get(i, j)).collect();
        assert_eq!(ones, vec![(1, 0), (2, 0), (2, 1)]);
        assert_eq!(lower_triangular_ones(1), F2Matrix::zeros(1, 1));
    }

    #[test]
    fn conjugating_cz_by_cnot_spreads_the_control() {
        let a = CzSpec::from_cz_list(3, [(1, 2)]);
        let p = CnotMatrix::from_cnots(3, &[(0, 1)]);
        let got = conjugate_cz(&a, &p).unwrap();
        assert_eq!(got, CzSpec::from_cz_list(3, [(1, 2), (0, 2)]));
        assert_eq!(conjugate_cz(&a, &CnotMatrix::identity(3)).unwrap(), a);
    }

    #[test]
    fn solve_picks_a_single_matching_row() {
        let pc = F2Matrix::parse(&["1100", "0110", "0011"]).unwrap();
        let b = F2RowVector::from_bits(&[false, true, true, false]);
        let x = min_weight_row_solve(&pc, &b, &[0, 1, 2, 3], 20).unwrap();
        assert_eq!(x.support(), vec![1]);
    }

    #[test]
    fn infeasible_is_distinct_from_dimension_errors() {
        let pc = F2Matrix::parse(&["10", "10"]).unwrap();
        let b = F2RowVector::from_bits(&[false, true]);
        assert_eq!(min_weight_row_solve(&pc, &b, &[0, 1], 20), Err(F2Error::Infeasible));
        assert!(matches!(
            min_weight_row_solve(&pc, &b, &[0], 20),
            Err(F2Error::DimensionMismatch(_))
        ));
    }

    #[test]
    fn matrix_json_round_trip() {
        let m = F2Matrix::parse(&["10110", "01001", "11111"]).unwrap();
        let s = serde_json::to_string(&m).unwrap();
        assert_eq!(s, r#"{"rows":3,"cols":5,"data":["d0","21","f1"]}"#);
        let back: F2Matrix = serde_json::from_str(&s).unwrap();
        assert_eq!(back, m);
    }
}
