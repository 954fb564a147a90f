//! Signed Pauli strings, weighted sums of them, and their sparse matrices.
//!
//! A [`PauliString`] on `n <= 128` qubits is stored as two bit masks and a
//! phase exponent. Internally the operator is `i^k * X^x Z^z` with the `X`
//! factor to the left of the `Z` factor on every qubit; this keeps the group
//! law a single popcount. The word form (letters `I X Y Z`) is recovered with
//! [`PauliString::word_phase`].
//!
//! Qubit `j` corresponds to bit `j` of a computational basis index.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use num_complex::Complex64;
use rayon::prelude::*;

use crate::error::{Error, Result};

pub type C64 = Complex64;

pub const MAX_QUBITS: usize = 128;
/// Largest register for which a full dense matrix is built.
pub const DENSE_QUBIT_LIMIT: usize = 16;
/// Largest register for which a sparse matrix or state vector is built.
pub const SPARSE_QUBIT_LIMIT: usize = 24;

/// `i^k` for `k` in `0..4`.
pub fn i_pow(k: u8) -> C64 {
    match k & 3 {
        0 => C64::new(1.0, 0.0),
        1 => C64::new(0.0, 1.0),
        2 => C64::new(-1.0, 0.0),
        _ => C64::new(0.0, -1.0),
    }
}

/// Signed multi-qubit Pauli operator.
#[derive(Clone, Copy, PartialEq, Eq, Hash, Debug)]
pub struct PauliString {
    n: usize,
    x: u128,
    z: u128,
    /// Exponent of `i` in the `X^x Z^z` ordering.
    k: u8,
}

fn mask(n: usize) -> u128 {
    if n == 128 {
        u128::MAX
    } else {
        (1u128 << n) - 1
    }
}

impl PauliString {
    pub fn identity(n: usize) -> Self {
        assert!(n <= MAX_QUBITS, "at most {MAX_QUBITS} qubits");
        Self { n, x: 0, z: 0, k: 0 }
    }

    /// Builds `i^word_k * P` where `P` is the Hermitian word with the given masks.
    pub fn from_masks(n: usize, x: u128, z: u128, word_k: u8) -> Self {
        assert!(n <= MAX_QUBITS, "at most {MAX_QUBITS} qubits");
        let m = mask(n);
        assert!(x & !m == 0 && z & !m == 0, "mask wider than {n} qubits");
        // Y = i X Z, so the word phase must be corrected by popcount(x & z).
        let k = (word_k as u32 + (x & z).count_ones()) as u8 & 3;
        Self { n, x, z, k }
    }

    pub fn single(n: usize, qubit: usize, letter: char) -> Self {
        assert!(qubit < n);
        let b = 1u128 << qubit;
        match letter {
            'I' => Self::identity(n),
            'X' => Self::from_masks(n, b, 0, 0),
            'Y' => Self::from_masks(n, b, b, 0),
            'Z' => Self::from_masks(n, 0, b, 0),
            _ => panic!("unknown Pauli letter {letter}"),
        }
    }

    pub fn x(n: usize, q: usize) -> Self {
        Self::single(n, q, 'X')
    }
    pub fn y(n: usize, q: usize) -> Self {
        Self::single(n, q, 'Y')
    }
    pub fn z(n: usize, q: usize) -> Self {
        Self::single(n, q, 'Z')
    }

    /// Product of single-qubit letters on the listed qubits.
    pub fn from_sparse(n: usize, ops: &[(usize, char)]) -> Self {
        ops.iter().fold(Self::identity(n), |acc, &(q, c)| acc.mul_unchecked(&Self::single(n, q, c)))
    }

    pub fn num_qubits(&self) -> usize {
        self.n
    }
    pub fn x_mask(&self) -> u128 {
        self.x
    }
    pub fn z_mask(&self) -> u128 {
        self.z
    }

    /// Exponent `k` such that `self = i^k * word`, with `word` Hermitian.
    pub fn word_phase(&self) -> u8 {
        (self.k as u32 + 4 - ((self.x & self.z).count_ones() & 3)) as u8 & 3
    }

    pub fn phase(&self) -> C64 {
        i_pow(self.word_phase())
    }

    /// Same letters with phase `+1`.
    pub fn unsigned(&self) -> Self {
        Self::from_masks(self.n, self.x, self.z, 0)
    }

    pub fn with_phase(&self, word_k: u8) -> Self {
        Self::from_masks(self.n, self.x, self.z, word_k)
    }

    pub fn negate(&self) -> Self {
        Self { k: (self.k + 2) & 3, ..*self }
    }

    pub fn times_i(&self) -> Self {
        Self { k: (self.k + 1) & 3, ..*self }
    }

    pub fn is_identity_up_to_phase(&self) -> bool {
        self.x == 0 && self.z == 0
    }

    pub fn is_diagonal(&self) -> bool {
        self.x == 0
    }

    pub fn is_hermitian(&self) -> bool {
        self.word_phase() & 1 == 0
    }

    pub fn weight(&self) -> u32 {
        (self.x | self.z).count_ones()
    }

    pub fn support(&self) -> Vec<usize> {
        let s = self.x | self.z;
        (0..self.n).filter(|&q| s >> q & 1 == 1).collect()
    }

    pub fn letter(&self, q: usize) -> char {
        match (self.x >> q & 1, self.z >> q & 1) {
            (0, 0) => 'I',
            (1, 0) => 'X',
            (1, 1) => 'Y',
            _ => 'Z',
        }
    }

    pub fn mul_unchecked(&self, other: &Self) -> Self {
        // (X^a Z^b)(X^c Z^d) = (-1)^{b.c} X^{a+c} Z^{b+d}
        let sign = ((self.z & other.x).count_ones() & 1) as u8 * 2;
        Self { n: self.n, x: self.x ^ other.x, z: self.z ^ other.z, k: (self.k + other.k + sign) & 3 }
    }

    /// Exact product `self * other`.
    pub fn mul(&self, other: &Self) -> Result<Self> {
        if self.n != other.n {
            return Err(Error::Dimension(self.n, other.n));
        }
        Ok(self.mul_unchecked(other))
    }

    /// Symplectic commutation test.
    pub fn commutes(&self, other: &Self) -> Result<bool> {
        if self.n != other.n {
            return Err(Error::Dimension(self.n, other.n));
        }
        Ok(self.commutes_unchecked(other))
    }

    pub(crate) fn commutes_unchecked(&self, other: &Self) -> bool {
        ((self.x & other.z).count_ones() + (self.z & other.x).count_ones()).is_multiple_of(2)
    }

    pub fn adjoint(&self) -> Self {
        let wk = self.word_phase();
        self.with_phase((4 - wk) & 3)
    }

    /// Action on a computational basis state: `P|s> = phase |s'>`.
    #[inline]
    pub fn apply_basis(&self, s: u64) -> (u64, C64) {
        let s128 = s as u128;
        let sign = ((self.z & s128).count_ones() & 1) as u8 * 2;
        ((s128 ^ self.x) as u64, i_pow(self.k + sign))
    }

    /// Same as [`apply_basis`](Self::apply_basis) with the phase as an exponent of `i`.
    #[inline]
    pub fn apply_basis_k(&self, s: u64) -> (u64, u8) {
        let sign = ((self.z & s as u128).count_ones() & 1) as u8 * 2;
        ((s as u128 ^ self.x) as u64, (self.k + sign) & 3)
    }

    /// Word with qubit 0 leftmost, without phase.
    pub fn word(&self) -> String {
        (0..self.n).map(|q| self.letter(q)).collect()
    }

    /// Relabels qubits: qubit `q` of `self` becomes qubit `map[q]` of a register of size `n`.
    pub fn embed(&self, n: usize, map: &[usize]) -> Self {
        assert_eq!(map.len(), self.n);
        let mut x = 0u128;
        let mut z = 0u128;
        for (q, &t) in map.iter().enumerate() {
            x |= (self.x >> q & 1) << t;
            z |= (self.z >> q & 1) << t;
        }
        Self::from_masks(n, x, z, self.word_phase())
    }
}

impl fmt::Display for PauliString {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let p = ["+", "+i", "-", "-i"][self.word_phase() as usize];
        write!(f, "{p}{}", self.word())
    }
}

impl FromStr for PauliString {
    type Err = Error;

    /// Parses an optional sign prefix (`+`, `-`, `+i`, `-i`, `i`) followed by letters.
    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        let (k, body) = if let Some(r) = s.strip_prefix("+i") {
            (1, r)
        } else if let Some(r) = s.strip_prefix("-i") {
            (3, r)
        } else if let Some(r) = s.strip_prefix('+') {
            (0, r)
        } else if let Some(r) = s.strip_prefix('-') {
            (2, r)
        } else if let Some(r) = s.strip_prefix('i') {
            (1, r)
        } else {
            (0, s)
        };
        let n = body.chars().count();
        if n > MAX_QUBITS {
            return Err(Error::Capacity { what: "qubits", got: n, limit: MAX_QUBITS });
        }
        let mut x = 0u128;
        let mut z = 0u128;
        for (q, c) in body.chars().enumerate() {
            match c {
                'I' => {}
                'X' => x |= 1 << q,
                'Y' => {
                    x |= 1 << q;
                    z |= 1 << q
                }
                'Z' => z |= 1 << q,
                _ => return Err(Error::Parse(format!("bad Pauli letter {c:?} in {s:?}"))),
            }
        }
        Ok(Self::from_masks(n, x, z, k))
    }
}

/// Magnitude below which a coefficient is dropped.
pub const COEFF_EPS: f64 = 1e-14;

/// Complex-weighted sum of Pauli words; duplicate words are merged eagerly.
#[derive(Clone, Debug, PartialEq)]
pub struct OperatorSum {
    n: usize,
    terms: BTreeMap<(u128, u128), C64>,
}

impl OperatorSum {
    pub fn zero(n: usize) -> Self {
        Self { n, terms: BTreeMap::new() }
    }

    pub fn identity(n: usize) -> Self {
        let mut s = Self::zero(n);
        s.add_term(C64::new(1.0, 0.0), &PauliString::identity(n));
        s
    }

    pub fn from_terms(n: usize, terms: impl IntoIterator<Item = (C64, PauliString)>) -> Self {
        let mut s = Self::zero(n);
        for (c, p) in terms {
            s.add_term(c, &p);
        }
        s
    }

    pub fn num_qubits(&self) -> usize {
        self.n
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    /// Adds `c * p`; the phase of `p` is folded into the coefficient.
    pub fn add_term(&mut self, c: C64, p: &PauliString) {
        assert_eq!(p.num_qubits(), self.n, "operator register mismatch");
        let key = (p.x_mask(), p.z_mask());
        let c = c * p.phase();
        let e = self.terms.entry(key).or_insert(C64::new(0.0, 0.0));
        *e += c;
        if e.norm() < COEFF_EPS {
            self.terms.remove(&key);
        }
    }

    pub fn add_real(&mut self, c: f64, p: &PauliString) {
        self.add_term(C64::new(c, 0.0), p);
    }

    pub fn add(&mut self, other: &OperatorSum) {
        for (c, p) in other.iter() {
            self.add_term(c, &p);
        }
    }

    pub fn scale(&self, a: C64) -> Self {
        Self::from_terms(self.n, self.iter().map(|(c, p)| (c * a, p)))
    }

    pub fn product(&self, other: &OperatorSum) -> Result<Self> {
        if self.n != other.n {
            return Err(Error::Dimension(self.n, other.n));
        }
        let mut out = Self::zero(self.n);
        for (a, p) in self.iter() {
            for (b, q) in other.iter() {
                out.add_term(a * b, &p.mul_unchecked(&q));
            }
        }
        Ok(out)
    }

    /// Terms as `(coefficient, unsigned word)`, in canonical mask order.
    pub fn iter(&self) -> impl Iterator<Item = (C64, PauliString)> + '_ {
        self.terms.iter().map(move |(&(x, z), &c)| (c, PauliString::from_masks(self.n, x, z, 0)))
    }

    pub fn coefficient(&self, p: &PauliString) -> C64 {
        let c = self.terms.get(&(p.x_mask(), p.z_mask())).copied().unwrap_or_default();
        c / p.phase()
    }

    pub fn is_hermitian(&self, tol: f64) -> bool {
        self.terms.values().all(|c| c.im.abs() <= tol)
    }

    pub fn adjoint(&self) -> Self {
        Self::from_terms(self.n, self.iter().map(|(c, p)| (c.conj(), p)))
    }

    pub fn commutes_with(&self, p: &PauliString) -> bool {
        self.iter().all(|(_, q)| q.commutes_unchecked(p))
    }

    pub fn max_abs_diff(&self, other: &OperatorSum) -> f64 {
        let mut d = self.clone();
        d.add(&other.scale(C64::new(-1.0, 0.0)));
        d.terms.values().map(|c| c.norm()).fold(0.0, f64::max)
    }

    /// `y = self * x` over the full `2^n` space.
    pub fn apply(&self, x: &[C64], y: &mut [C64]) -> Result<()> {
        check_capacity(self.n, SPARSE_QUBIT_LIMIT)?;
        let dim = 1usize << self.n;
        assert_eq!(x.len(), dim);
        assert_eq!(y.len(), dim);
        let terms: Vec<(C64, PauliString)> = self.iter().collect();
        y.par_iter_mut().enumerate().for_each(|(r, yr)| {
            let mut acc = C64::new(0.0, 0.0);
            for (c, p) in &terms {
                let col = r as u64 ^ p.x_mask() as u64;
                let (_, ph) = p.apply_basis(col);
                acc += c * ph * x[col as usize];
            }
            *yr = acc;
        });
        Ok(())
    }

    /// Text dump: one `<re> <im> <word>` line per term.
    pub fn to_text(&self) -> String {
        let mut s = String::new();
        for (c, p) in self.iter() {
            s.push_str(&format!("{:?} {:?} {}\n", c.re, c.im, p.word()));
        }
        s
    }

    pub fn from_text(text: &str) -> Result<Self> {
        let mut out: Option<OperatorSum> = None;
        for (lineno, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let parts: Vec<&str> = line.split_whitespace().collect();
            if parts.len() != 3 {
                return Err(Error::Parse(format!("line {}: expected `<re> <im> <word>`", lineno + 1)));
            }
            let re: f64 = parts[0].parse().map_err(|e| Error::Parse(format!("line {}: {e}", lineno + 1)))?;
            let im: f64 = parts[1].parse().map_err(|e| Error::Parse(format!("line {}: {e}", lineno + 1)))?;
            let p: PauliString = parts[2].parse()?;
            let op = out.get_or_insert_with(|| OperatorSum::zero(p.num_qubits()));
            if op.n != p.num_qubits() {
                return Err(Error::Dimension(op.n, p.num_qubits()));
            }
            // Exact insert: text round trips must not merge through arithmetic.
            op.terms.insert((p.x_mask(), p.z_mask()), C64::new(re, im));
        }
        out.ok_or_else(|| Error::Parse("empty operator dump".into()))
    }
}

fn check_capacity(n: usize, limit: usize) -> Result<()> {
    if n > limit {
        Err(Error::Capacity { what: "qubits", got: n, limit })
    } else {
        Ok(())
    }
}

/// Row-compressed complex matrix with sorted column indices.
#[derive(Clone, Debug, PartialEq)]
pub struct SparseMatrix {
    dim: usize,
    row_ptr: Vec<usize>,
    cols: Vec<usize>,
    vals: Vec<C64>,
}

impl SparseMatrix {
    pub fn from_rows(dim: usize, rows: Vec<Vec<(usize, C64)>>) -> Self {
        assert_eq!(rows.len(), dim);
        let mut row_ptr = Vec::with_capacity(dim + 1);
        let mut cols = Vec::new();
        let mut vals = Vec::new();
        row_ptr.push(0);
        for mut row in rows {
            row.sort_by_key(|e| e.0);
            let mut last: Option<usize> = None;
            for (c, v) in row {
                if last == Some(c) {
                    *vals.last_mut().unwrap() += v;
                } else {
                    cols.push(c);
                    vals.push(v);
                    last = Some(c);
                }
            }
            // drop exact cancellations
            let start = *row_ptr.last().unwrap();
            let mut w = start;
            for r in start..cols.len() {
                if vals[r].norm() >= COEFF_EPS {
                    cols[w] = cols[r];
                    vals[w] = vals[r];
                    w += 1;
                }
            }
            cols.truncate(w);
            vals.truncate(w);
            row_ptr.push(w);
        }
        Self { dim, row_ptr, cols, vals }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn nnz(&self) -> usize {
        self.vals.len()
    }

    pub fn row(&self, r: usize) -> impl Iterator<Item = (usize, C64)> + '_ {
        (self.row_ptr[r]..self.row_ptr[r + 1]).map(move |i| (self.cols[i], self.vals[i]))
    }

    pub fn get(&self, r: usize, c: usize) -> C64 {
        let s = &self.cols[self.row_ptr[r]..self.row_ptr[r + 1]];
        match s.binary_search(&c) {
            Ok(i) => self.vals[self.row_ptr[r] + i],
            Err(_) => C64::new(0.0, 0.0),
        }
    }

    pub fn matvec(&self, x: &[C64], y: &mut [C64]) {
        y.par_iter_mut().enumerate().for_each(|(r, yr)| {
            *yr = self.row(r).map(|(c, v)| v * x[c]).sum();
        });
    }

    /// Largest `|M - M^dagger|` entry.
    pub fn hermiticity_defect(&self) -> f64 {
        let mut worst = 0.0f64;
        for r in 0..self.dim {
            for (c, v) in self.row(r) {
                worst = worst.max((v - self.get(c, r).conj()).norm());
            }
        }
        worst
    }

    pub fn to_dense(&self) -> nalgebra::DMatrix<C64> {
        let mut m = nalgebra::DMatrix::<C64>::zeros(self.dim, self.dim);
        for r in 0..self.dim {
            for (c, v) in self.row(r) {
                m[(r, c)] = v;
            }
        }
        m
    }
}

/// Exact sparse matrix of an operator over the full `2^n` space.
pub fn matrix_of(op: &OperatorSum) -> Result<SparseMatrix> {
    check_capacity(op.num_qubits(), SPARSE_QUBIT_LIMIT)?;
    let dim = 1usize << op.num_qubits();
    let terms: Vec<(C64, PauliString)> = op.iter().collect();
    let rows: Vec<Vec<(usize, C64)>> = (0..dim)
        .into_par_iter()
        .map(|r| {
            terms
                .iter()
                .map(|(c, p)| {
                    let col = r as u64 ^ p.x_mask() as u64;
                    let (_, ph) = p.apply_basis(col);
                    (col as usize, c * ph)
                })
                .collect()
        })
        .collect();
    Ok(SparseMatrix::from_rows(dim, rows))
}

/// Dense matrix; restricted to registers of at most [`DENSE_QUBIT_LIMIT`] qubits.
pub fn dense_matrix_of(op: &OperatorSum) -> Result<nalgebra::DMatrix<C64>> {
    check_capacity(op.num_qubits(), DENSE_QUBIT_LIMIT)?;
    Ok(matrix_of(op)?.to_dense())
}

/// Result of a GF(2) rank computation on a commuting generator set.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct StabilizerRank {
    pub rank: usize,
    pub log2_degeneracy: usize,
}

/// Symplectic rank of a stabilizer generator set, with sign consistency checks.
pub fn gf2_rank(generators: &[PauliString]) -> Result<StabilizerRank> {
    let n = match generators.first() {
        Some(g) => g.num_qubits(),
        None => return Ok(StabilizerRank { rank: 0, log2_degeneracy: 0 }),
    };
    for (i, a) in generators.iter().enumerate() {
        if a.num_qubits() != n {
            return Err(Error::Dimension(n, a.num_qubits()));
        }
        for (j, b) in generators.iter().enumerate().skip(i + 1) {
            if !a.commutes_unchecked(b) {
                return Err(Error::NotStabilizerGroup(i, j));
            }
        }
    }
    // pivots: (bit position in the 2n-bit symplectic vector, reduced row)
    let mut pivots: Vec<(usize, PauliString)> = Vec::new();
    let bit = |p: &PauliString, pos: usize| -> bool {
        if pos < n {
            p.x_mask() >> pos & 1 == 1
        } else {
            p.z_mask() >> (pos - n) & 1 == 1
        }
    };
    for g in generators {
        let mut r = *g;
        for (pos, piv) in &pivots {
            if bit(&r, *pos) {
                r = r.mul_unchecked(piv);
            }
        }
        if r.is_identity_up_to_phase() {
            if r.word_phase() != 0 {
                return Err(Error::InconsistentSigns);
            }
            continue;
        }
        let pos = (0..2 * n).find(|&p| bit(&r, p)).unwrap();
        // keep previous pivots reduced in the new pivot column
        for (_, piv) in pivots.iter_mut() {
            if bit(piv, pos) {
                *piv = piv.mul_unchecked(&r);
            }
        }
        pivots.push((pos, r));
    }
    Ok(StabilizerRank { rank: pivots.len(), log2_degeneracy: n - pivots.len() })
}
