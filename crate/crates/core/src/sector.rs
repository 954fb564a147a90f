//! Simultaneous eigenspaces of the conserved plaquette and loop operators.

use std::collections::HashMap;
use std::fmt;

use nalgebra::{DMatrix, DVector};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fermion::{conserved_set, island_qubits, jw_order, ConservedSet, ModelParams};
use crate::ising_map::square_octagon;
use crate::lattice::SignedLattice;
use crate::linalg::{degeneracy_groups, eigh, eigvalsh, lanczos_lowest, LanczosOptions};
use crate::pauli::{gf2_rank, OperatorSum, PauliString, SparseMatrix, C64, SPARSE_QUBIT_LIMIT};

/// Relative tolerance for grouping degenerate eigenvalues.
pub const GROUP_REL_TOL: f64 = 1e-8;
/// Absolute grouping tolerance near zero.
pub const GROUP_ABS_TOL: f64 = 1e-10;
/// Largest block diagonalized densely when the full spectrum is requested.
pub const DENSE_LIMIT: usize = 4096;
/// Above this size a partial request goes to the iterative solver.
pub const PARTIAL_DENSE_LIMIT: usize = 512;
const LEAK_TOL: f64 = 1e-10;

/// Eigenvalue labels; `None` leaves a label free.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct SectorLabel {
    pub c_w: Vec<Option<i8>>,
    pub c_g: Vec<Option<i8>>,
    pub loops: [Option<i8>; 2],
}

impl SectorLabel {
    pub fn free(nw: usize, ng: usize) -> Self {
        Self { c_w: vec![None; nw], c_g: vec![None; ng], loops: [None; 2] }
    }

    /// All plaquettes `+1`, loops free.
    pub fn all_plus(nw: usize, ng: usize) -> Self {
        Self { c_w: vec![Some(1); nw], c_g: vec![Some(1); ng], loops: [None; 2] }
    }

    pub fn with_loops(mut self, a: i8, b: i8) -> Self {
        self.loops = [Some(a), Some(b)];
        self
    }

    pub fn is_fully_fixed(&self) -> bool {
        self.c_w.iter().chain(self.c_g.iter()).chain(self.loops.iter()).all(|v| v.is_some())
    }

    /// Plaquette part only, loops freed.
    pub fn plaquettes_only(&self) -> Self {
        Self { c_w: self.c_w.clone(), c_g: self.c_g.clone(), loops: [None; 2] }
    }

    fn constraints(&self, cs: &ConservedSet) -> Result<Vec<PauliString>> {
        if self.c_w.len() != cs.white.len() || self.c_g.len() != cs.gray.len() {
            return Err(Error::Dimension(self.c_w.len() + self.c_g.len(), cs.white.len() + cs.gray.len()));
        }
        let mut out = Vec::new();
        let mut push = |op: &PauliString, v: Option<i8>| -> Result<()> {
            match v {
                None => {}
                Some(1) => out.push(*op),
                Some(-1) => out.push(op.negate()),
                Some(x) => return Err(Error::Config(format!("label value {x} is not +-1"))),
            }
            Ok(())
        };
        for (op, v) in cs.white.iter().zip(&self.c_w) {
            push(op, *v)?;
        }
        for (op, v) in cs.gray.iter().zip(&self.c_g) {
            push(op, *v)?;
        }
        match (&cs.loops, self.loops) {
            (Some((a, b)), l) => {
                push(a, l[0])?;
                push(b, l[1])?;
            }
            (None, [None, None]) => {}
            (None, _) => return Err(Error::Config("loop labels on a lattice without loops".into())),
        }
        Ok(out)
    }
}

fn sign_char(v: Option<i8>) -> char {
    match v {
        Some(1) => '+',
        Some(_) => '-',
        None => '*',
    }
}

impl fmt::Display for SectorLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let w: String = self.c_w.iter().map(|v| sign_char(*v)).collect();
        let g: String = self.c_g.iter().map(|v| sign_char(*v)).collect();
        let l: String = self.loops.iter().map(|v| sign_char(*v)).collect();
        write!(f, "w{w}/g{g}/l{l}")
    }
}

/// Orthonormal basis of a sector as sparse columns over the computational basis.
/// Column supports are pairwise disjoint.
#[derive(Clone, Debug)]
pub struct SectorBasis {
    pub label: SectorLabel,
    pub num_qubits: usize,
    columns: Vec<Vec<(u64, C64)>>,
    lookup: HashMap<u64, (usize, C64)>,
}

impl SectorBasis {
    pub fn dim(&self) -> usize {
        self.columns.len()
    }
    pub fn columns(&self) -> &[Vec<(u64, C64)>] {
        &self.columns
    }
    /// Column index and amplitude of a basis state, if it lies in the sector support.
    pub fn locate(&self, s: u64) -> Option<(usize, C64)> {
        self.lookup.get(&s).copied()
    }
    /// True when each column is a single computational basis state.
    pub fn is_index_set(&self) -> bool {
        self.columns.iter().all(|c| c.len() == 1)
    }
    /// Embeds sector coordinates into the full space, as a sparse map.
    pub fn embed(&self, coords: &[C64]) -> HashMap<u64, C64> {
        let mut out = HashMap::new();
        for (col, &a) in self.columns.iter().zip(coords) {
            for &(s, c) in col {
                *out.entry(s).or_insert(C64::new(0.0, 0.0)) += a * c;
            }
        }
        out
    }
}

/// Basis of the simultaneous eigenspace selected by `label`.
pub fn sector_basis(conserved: &ConservedSet, label: &SectorLabel) -> Result<SectorBasis> {
    let gens = label.constraints(conserved)?;
    let n = conserved.white.first().or(conserved.gray.first()).map(|p| p.num_qubits()).unwrap_or(0);
    sector_basis_from(n, &gens, label.clone())
}

/// Basis of the joint `+1` eigenspace of commuting Hermitian Pauli generators.
pub fn sector_basis_from(n: usize, gens: &[PauliString], label: SectorLabel) -> Result<SectorBasis> {
    if n > SPARSE_QUBIT_LIMIT {
        return Err(Error::Capacity { what: "qubits", got: n, limit: SPARSE_QUBIT_LIMIT });
    }
    match gf2_rank(gens) {
        Err(Error::InconsistentSigns) => return Err(Error::EmptySector(label.to_string())),
        Err(e) => return Err(e),
        Ok(_) => {}
    }
    let (diag, off): (Vec<PauliString>, Vec<PauliString>) = gens.iter().partition(|g| g.is_diagonal());
    // subset products of the off-diagonal generators
    let mut group = vec![PauliString::identity(n)];
    for g in &off {
        let more: Vec<PauliString> = group.iter().map(|h| h.mul_unchecked(g)).collect();
        group.extend(more);
    }
    let weight = 1.0 / group.len() as f64;
    let dim_full = 1u64 << n;
    let candidates: Vec<u64> =
        (0..dim_full).into_par_iter().filter(|&s| diag.iter().all(|d| d.apply_basis_k(s).1 == 0)).collect();

    let mut columns = Vec::new();
    let mut lookup: HashMap<u64, (usize, C64)> = HashMap::new();
    let mut visited: HashMap<u64, ()> = HashMap::new();
    for s in candidates {
        if visited.contains_key(&s) {
            continue;
        }
        let mut v: HashMap<u64, C64> = HashMap::new();
        for g in &group {
            let (t, ph) = g.apply_basis(s);
            *v.entry(t).or_insert(C64::new(0.0, 0.0)) += ph * weight;
        }
        for &t in v.keys() {
            visited.insert(t, ());
        }
        let mut col: Vec<(u64, C64)> = v.into_iter().filter(|(_, c)| c.norm() > 1e-12).collect();
        if col.is_empty() {
            continue;
        }
        col.sort_by_key(|e| e.0);
        let norm = col.iter().map(|(_, c)| c.norm_sqr()).sum::<f64>().sqrt();
        // fix the phase so the first amplitude is real positive
        let ph = col[0].1 / col[0].1.norm();
        for e in col.iter_mut() {
            e.1 /= norm * ph;
        }
        let j = columns.len();
        for &(t, c) in &col {
            lookup.insert(t, (j, c));
        }
        columns.push(col);
    }
    if columns.is_empty() {
        return Err(Error::EmptySector(label.to_string()));
    }
    Ok(SectorBasis { label, num_qubits: n, columns, lookup })
}

/// Restriction `B^dagger H B` with a leakage check on `(I - P) H P`.
pub fn restrict(h: &OperatorSum, basis: &SectorBasis) -> Result<SparseMatrix> {
    if h.num_qubits() != basis.num_qubits {
        return Err(Error::Dimension(h.num_qubits(), basis.num_qubits));
    }
    let terms: Vec<(C64, PauliString)> = h.iter().collect();
    let out: Vec<(Vec<(usize, C64)>, f64)> = basis
        .columns
        .par_iter()
        .map(|col| {
            let mut hv: HashMap<u64, C64> = HashMap::new();
            for &(s, a) in col {
                for (c, p) in &terms {
                    let (t, ph) = p.apply_basis(s);
                    *hv.entry(t).or_insert(C64::new(0.0, 0.0)) += c * ph * a;
                }
            }
            let mut entries: HashMap<usize, C64> = HashMap::new();
            for (t, v) in &hv {
                if let Some((i, b)) = basis.lookup.get(t) {
                    *entries.entry(*i).or_insert(C64::new(0.0, 0.0)) += b.conj() * v;
                }
            }
            // residual of H b outside the span of the columns
            let mut leak = 0.0;
            for (t, v) in &hv {
                let r = match basis.lookup.get(t) {
                    Some((i, b)) => v - b * entries[i],
                    None => *v,
                };
                leak += r.norm_sqr();
            }
            (entries.into_iter().collect(), leak.sqrt())
        })
        .collect();
    let leak = out.iter().map(|o| o.1).fold(0.0, f64::max);
    if leak > LEAK_TOL * (1.0 + h.iter().map(|(c, _)| c.norm()).sum::<f64>()) {
        return Err(Error::NotBlockPreserving(leak));
    }
    // columns were computed; transpose to rows of the Hermitian matrix
    let dim = basis.dim();
    let mut rows: Vec<Vec<(usize, C64)>> = vec![Vec::new(); dim];
    for (j, (col, _)) in out.into_iter().enumerate() {
        for (i, v) in col {
            rows[i].push((j, v));
        }
    }
    Ok(SparseMatrix::from_rows(dim, rows))
}

fn is_real(m: &SparseMatrix) -> bool {
    (0..m.dim()).all(|r| m.row(r).all(|(_, v)| v.im.abs() < 1e-14))
}

fn real_dense(m: &SparseMatrix) -> DMatrix<f64> {
    let mut d = DMatrix::zeros(m.dim(), m.dim());
    for r in 0..m.dim() {
        for (c, v) in m.row(r) {
            d[(r, c)] = v.re;
        }
    }
    d
}

/// Ascending eigenvalues of a Hermitian sparse block, `k` lowest or all.
pub fn block_eigenvalues(m: &SparseMatrix, k: Option<usize>) -> Result<Vec<f64>> {
    let dim = m.dim();
    let want = k.unwrap_or(dim).min(dim);
    let dense_ok = if k.is_some() { dim <= PARTIAL_DENSE_LIMIT } else { dim <= DENSE_LIMIT };
    if dense_ok || want * 4 >= dim {
        let mut v = if is_real(m) { eigvalsh(real_dense(m)) } else { eigvalsh(m.to_dense()) };
        v.truncate(want);
        return Ok(v);
    }
    let opts = LanczosOptions::default();
    let vals = if is_real(m) {
        let rows: Vec<Vec<(usize, f64)>> = (0..dim).map(|r| m.row(r).map(|(c, v)| (c, v.re)).collect()).collect();
        lanczos_lowest(
            |x: &DVector<f64>| DVector::from_fn(dim, |r, _| rows[r].iter().map(|&(c, v)| v * x[c]).sum()),
            dim,
            want,
            &opts,
        )?
        .values
    } else {
        lanczos_lowest(
            |x: &DVector<C64>| {
                let mut y = vec![C64::new(0.0, 0.0); dim];
                m.matvec(x.as_slice(), &mut y);
                DVector::from_vec(y)
            },
            dim,
            want,
            &opts,
        )?
        .values
    };
    Ok(vals)
}

/// Lowest eigenpairs (dense) of a block, vectors in block coordinates.
pub fn block_eigenpairs(m: &SparseMatrix) -> (Vec<f64>, DMatrix<C64>) {
    eigh(m.to_dense())
}

/// Spectrum of one sector.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SectorSpectrum {
    pub label: String,
    pub values: Vec<f64>,
    pub groups: Vec<usize>,
}

/// Sorted eigenvalues with degeneracy groups, per sector.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct SpectrumResult {
    pub sectors: Vec<SectorSpectrum>,
}

impl SpectrumResult {
    pub fn push(&mut self, label: String, values: Vec<f64>) {
        let groups = degeneracy_groups(&values, GROUP_REL_TOL, GROUP_ABS_TOL);
        self.sectors.push(SectorSpectrum { label, values, groups });
    }

    pub fn sort(&mut self) {
        self.sectors.sort_by(|a, b| a.label.cmp(&b.label));
    }

    /// All eigenvalues merged and sorted.
    pub fn merged(&self) -> Vec<f64> {
        let mut v: Vec<f64> = self.sectors.iter().flat_map(|s| s.values.iter().copied()).collect();
        v.sort_by(f64::total_cmp);
        v
    }

    /// Sizes of the degeneracy groups of the first sector.
    pub fn group_sizes(&self, sector: usize) -> Vec<usize> {
        let g = &self.sectors[sector].groups;
        let mut sizes = Vec::new();
        for (i, &id) in g.iter().enumerate() {
            if i == 0 || id != g[i - 1] {
                sizes.push(0);
            }
            *sizes.last_mut().unwrap() += 1;
        }
        sizes
    }

    /// CSV with columns `sector,index,eigenvalue,group`.
    pub fn to_csv(&self) -> String {
        let mut s = String::from("sector,index,eigenvalue,group\n");
        for sec in &self.sectors {
            for (i, (v, g)) in sec.values.iter().zip(&sec.groups).enumerate() {
                s.push_str(&format!("{},{},{:.15e},{}\n", sec.label, i, v, g));
            }
        }
        s
    }

    pub fn from_csv(text: &str) -> Result<Self> {
        let mut out = SpectrumResult::default();
        for (ln, line) in text.lines().enumerate().skip(1) {
            let f: Vec<&str> = line.split(',').collect();
            if f.len() != 4 {
                return Err(Error::Parse(format!("line {}: expected 4 fields", ln + 1)));
            }
            let v: f64 = f[2].parse().map_err(|_| Error::Parse(format!("line {}: bad eigenvalue", ln + 1)))?;
            let g: usize = f[3].parse().map_err(|_| Error::Parse(format!("line {}: bad group", ln + 1)))?;
            match out.sectors.last_mut() {
                Some(s) if s.label == f[0] => {
                    s.values.push(v);
                    s.groups.push(g);
                }
                _ => out.sectors.push(SectorSpectrum { label: f[0].to_string(), values: vec![v], groups: vec![g] }),
            }
        }
        Ok(out)
    }
}

/// Eigenvalues of `h` restricted to a sector.
pub fn sector_spectrum(h: &OperatorSum, basis: &SectorBasis, k: Option<usize>) -> Result<SpectrumResult> {
    let m = restrict(h, basis)?;
    let vals = block_eigenvalues(&m, k)?;
    let mut r = SpectrumResult::default();
    r.push(basis.label.to_string(), vals);
    Ok(r)
}

/// Every fully fixed label consistent with the plaquette dependency.
pub fn all_fixed_labels(cs: &ConservedSet) -> Vec<SectorLabel> {
    let (nw, ng) = (cs.white.len(), cs.gray.len());
    let nl = if cs.loops.is_some() { 2 } else { 0 };
    let bits = nw + ng + nl;
    let to = |b: usize| Some(if b == 0 { 1i8 } else { -1 });
    (0u64..1 << bits)
        .map(|m| {
            let bit = |i: usize| ((m >> (bits - 1 - i)) & 1) as usize;
            let mut l = SectorLabel::free(nw, ng);
            for i in 0..nw {
                l.c_w[i] = to(bit(i));
            }
            for i in 0..ng {
                l.c_g[i] = to(bit(nw + i));
            }
            if nl == 2 {
                l.loops = [to(bit(nw + ng)), to(bit(nw + ng + 1))];
            }
            l
        })
        .filter(|l| l.constraints(cs).map(|g| gf2_rank(&g).is_ok()).unwrap_or(false))
        .collect()
}

/// Spectra of many sectors in parallel, merged in label order.
pub fn spectra(h: &OperatorSum, cs: &ConservedSet, labels: &[SectorLabel], k: Option<usize>) -> Result<SpectrumResult> {
    let parts: Vec<Result<SpectrumResult>> = labels
        .par_iter()
        .map(|l| {
            let b = sector_basis(cs, l)?;
            sector_spectrum(h, &b, k)
        })
        .collect();
    let mut out = SpectrumResult::default();
    for p in parts {
        out.sectors.extend(p?.sectors);
    }
    out.sort();
    Ok(out)
}

/// Global ground state location at one coupling.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GroundScanPoint {
    pub ratio: f64,
    pub energy: f64,
    /// Plaquette labels (loops freed) of all sectors tied for the ground energy.
    pub labels: Vec<String>,
    /// Number of fully fixed sectors tied, counted with multiplicity.
    pub degeneracy: usize,
}

/// For each `lambda`, the plaquette sectors holding the global ground state.
pub fn ground_sector_scan(
    lat: &crate::lattice::SignedLattice,
    delta: f64,
    lambdas: &[f64],
) -> Result<Vec<GroundScanPoint>> {
    let order = crate::fermion::jw_order(lat)?;
    let cs = crate::fermion::conserved_set(lat, &order)?;
    let labels = all_fixed_labels(&cs);
    let bases: Vec<SectorBasis> = labels.par_iter().map(|l| sector_basis(&cs, l)).collect::<Result<_>>()?;
    let mut out = Vec::new();
    for &lambda in lambdas {
        let h = crate::fermion::build_h(lat, &crate::fermion::ModelParams::new(delta, lambda), &order)?;
        let blocks: Vec<Vec<f64>> =
            bases.par_iter().map(|b| block_eigenvalues(&restrict(&h, b)?, None)).collect::<Result<_>>()?;
        let e0 = blocks.iter().map(|v| v[0]).fold(f64::INFINITY, f64::min);
        let tol = (GROUP_REL_TOL * e0.abs()).max(GROUP_ABS_TOL);
        let mut tied = std::collections::BTreeSet::new();
        let mut degeneracy = 0;
        for (b, v) in bases.iter().zip(&blocks) {
            let c = v.iter().take_while(|&&x| x - e0 <= tol).count();
            if c > 0 {
                tied.insert(b.label.plaquettes_only().to_string());
                degeneracy += c;
            }
        }
        let ratio = if delta != 0.0 { lambda / delta } else { f64::INFINITY };
        out.push(GroundScanPoint { ratio, energy: e0, labels: tied.into_iter().collect(), degeneracy });
    }
    Ok(out)
}

/// Numerical check of the projecting-back property of the square-octagon model.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ProjectingBackReport {
    pub delta: f64,
    pub lambda: f64,
    /// Levels in the `c^w = +1` sectors.
    pub reference_levels: usize,
    /// Levels in the even-parity space `prod C^w = +1`.
    pub parity_levels: usize,
    /// Number of even white patterns, i.e. how often each reference level repeats.
    pub multiplicity: usize,
    pub max_deviation: f64,
    pub link_sectors: usize,
    pub eigenstates: usize,
    /// Smallest weight of an eigenstate on any even white pattern.
    pub min_overlap: f64,
    /// Largest departure of a pattern weight from `1 / multiplicity`.
    pub max_weight_spread: f64,
    /// Largest `|K P(c) psi -+ P(c') psi|` over islands and patterns.
    pub link_map_deviation: f64,
}

impl ProjectingBackReport {
    /// Reasons the property fails, empty when it holds.
    pub fn violations(&self) -> Vec<String> {
        let mut v = Vec::new();
        if self.parity_levels != self.reference_levels * self.multiplicity {
            v.push(format!("{} levels vs {} x {}", self.parity_levels, self.reference_levels, self.multiplicity));
        }
        if !(self.max_deviation <= 1e-8) {
            v.push(format!("spectral deviation {:e}", self.max_deviation));
        }
        if !(self.min_overlap > 1e-10) {
            v.push(format!("overlap {:e} with some sector", self.min_overlap));
        }
        if !(self.link_map_deviation <= 1e-10) {
            v.push(format!("link map deviation {:e}", self.link_map_deviation));
        }
        v
    }
}

fn white_pattern(whites: &[PauliString], s: u64) -> usize {
    whites.iter().enumerate().map(|(i, w)| ((w.apply_basis_k(s).1 / 2) as usize) << i).sum()
}

/// Checks, for the square-octagon Hamiltonian with all `c^w = +1`, that its
/// spectrum on the even-parity space repeats the fixed-sector spectrum, and
/// that every eigenstate sharing the eigenvalues of the island operators
/// `K_i = X X` weighs equally on every even white pattern.
pub fn projecting_back_check(lat: &SignedLattice, delta: f64, lambda: f64) -> Result<ProjectingBackReport> {
    let params = ModelParams::new(delta, lambda);
    params.validate()?;
    let order = jw_order(lat)?;
    let cs = conserved_set(lat, &order)?;
    let nw = cs.white.len();
    let so = square_octagon(lat, &params, &order, &vec![1; nw])?;
    let h = so.to_operator();
    let n = order.num_qubits();
    if cs.white.iter().any(|w| !w.is_diagonal()) {
        return Err(Error::Verification("white plaquettes are not diagonal".into()));
    }

    // (1) spectra: c^w = +1 against the whole even-parity space
    let labels = all_fixed_labels(&cs);
    let even = |l: &SectorLabel| l.c_w.iter().map(|c| c.unwrap_or(1)).product::<i8>() == 1;
    let plus: Vec<SectorLabel> = labels.iter().filter(|l| l.c_w.iter().all(|&c| c == Some(1))).cloned().collect();
    let parity: Vec<SectorLabel> = labels.iter().filter(|l| even(l)).cloned().collect();
    let reference = spectra(&h, &cs, &plus, None)?.merged();
    let whole = spectra(&h, &cs, &parity, None)?.merged();
    let multiplicity = 1usize << (nw - 1);
    let mut repeated: Vec<f64> = reference.iter().flat_map(|&e| std::iter::repeat_n(e, multiplicity)).collect();
    repeated.sort_by(f64::total_cmp);
    let max_deviation = if repeated.len() == whole.len() {
        repeated.iter().zip(&whole).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max)
    } else {
        f64::INFINITY
    };

    // (2) overlaps inside joint eigenspaces of the island operators and the parity
    let ks: Vec<PauliString> = (0..lat.num_islands())
        .map(|i| {
            let (a, b) = island_qubits(i, &order);
            PauliString::from_sparse(n, &[(a, 'X'), (b, 'X')])
        })
        .collect();
    let total = cs.white.iter().fold(PauliString::identity(n), |acc, w| acc.mul_unchecked(w));
    let mut flips = Vec::with_capacity(ks.len());
    for k in &ks {
        if !h.commutes_with(k) {
            return Err(Error::Verification("island operator does not commute with H".into()));
        }
        let f: usize = cs.white.iter().enumerate().filter(|(_, w)| !w.commutes_unchecked(k)).map(|(i, _)| 1 << i).sum();
        if f.count_ones() != 2 {
            return Err(Error::Verification("island operator must flip two white plaquettes".into()));
        }
        flips.push(f);
    }
    let even_patterns: Vec<usize> = (0..1usize << nw).filter(|p| p.count_ones() % 2 == 0).collect();
    let m = ks.len();
    let results: Vec<Option<(usize, f64, f64, f64)>> = (0u64..1 << m)
        .into_par_iter()
        .map(|signs| -> Result<Option<(usize, f64, f64, f64)>> {
            let mut gens = vec![total];
            for (i, k) in ks.iter().enumerate() {
                gens.push(if signs >> i & 1 == 1 { k.negate() } else { *k });
            }
            let basis = match sector_basis_from(n, &gens, SectorLabel::free(0, 0)) {
                Ok(b) => b,
                Err(Error::EmptySector(_)) => return Ok(None),
                Err(e) => return Err(e),
            };
            // pattern weights of each column; supports are disjoint
            let table: Vec<Vec<f64>> = basis
                .columns()
                .iter()
                .map(|col| {
                    let mut w = vec![0.0; 1 << nw];
                    for &(st, a) in col {
                        w[white_pattern(&cs.white, st)] += a.norm_sqr();
                    }
                    w
                })
                .collect();
            let (vals, vecs) = block_eigenpairs(&restrict(&h, &basis)?);
            let target = 1.0 / multiplicity as f64;
            let (mut lo, mut spread) = (f64::INFINITY, 0.0f64);
            for c in 0..vals.len() {
                let mut w = vec![0.0; 1 << nw];
                for (r, row) in table.iter().enumerate() {
                    let p = vecs[(r, c)].norm_sqr();
                    for (acc, t) in w.iter_mut().zip(row) {
                        *acc += p * t;
                    }
                }
                for &pat in &even_patterns {
                    lo = lo.min(w[pat]);
                    spread = spread.max((w[pat] - target).abs());
                }
            }
            // K_i P(c) psi = k_i P(c') psi on the sector ground state
            let coords: Vec<C64> = (0..vals.len()).map(|r| vecs[(r, 0)]).collect();
            let psi = basis.embed(&coords);
            let mut map_dev = 0.0f64;
            for (i, k) in ks.iter().enumerate() {
                let ki = if signs >> i & 1 == 1 { -1.0 } else { 1.0 };
                for (&st, &a) in &psi {
                    let (t, ph) = k.apply_basis(st);
                    let b = psi.get(&t).copied().unwrap_or_default();
                    map_dev = map_dev.max((ph * a - b * ki).norm());
                    debug_assert_eq!(white_pattern(&cs.white, t), white_pattern(&cs.white, st) ^ flips[i]);
                }
            }
            Ok(Some((vals.len(), lo, spread, map_dev)))
        })
        .collect::<Result<_>>()?;
    let found: Vec<(usize, f64, f64, f64)> = results.into_iter().flatten().collect();
    Ok(ProjectingBackReport {
        delta,
        lambda,
        reference_levels: reference.len(),
        parity_levels: whole.len(),
        multiplicity,
        max_deviation,
        link_sectors: found.len(),
        eigenstates: found.iter().map(|f| f.0).sum(),
        min_overlap: found.iter().map(|f| f.1).fold(f64::INFINITY, f64::min),
        max_weight_spread: found.iter().map(|f| f.2).fold(0.0, f64::max),
        link_map_deviation: found.iter().map(|f| f.3).fold(0.0, f64::max),
    })
}

/// Full spectrum of `h` as `(energy, multiplicity)` pairs, dense.
pub fn level_multiplicities(h: &OperatorSum) -> Result<Vec<(f64, usize)>> {
    let dim = 1usize << h.num_qubits();
    if dim > DENSE_LIMIT {
        return Err(Error::Capacity { what: "dense dimension", got: dim, limit: DENSE_LIMIT });
    }
    let values = eigvalsh(crate::pauli::matrix_of(h)?.to_dense());
    let groups = degeneracy_groups(&values, GROUP_REL_TOL, GROUP_ABS_TOL);
    let mut out: Vec<(f64, usize)> = Vec::new();
    for (v, g) in values.iter().zip(&groups) {
        match out.get_mut(*g) {
            Some(e) => e.1 += 1,
            None => out.push((*v, 1)),
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fermion::build_h;
    use crate::lattice::{build_lattice, Boundary};

    fn setup() -> (crate::lattice::SignedLattice, crate::fermion::ModeOrder, ConservedSet) {
        let lat = build_lattice(2, Boundary::Torus).unwrap();
        let o = jw_order(&lat).unwrap();
        let cs = conserved_set(&lat, &o).unwrap();
        (lat, o, cs)
    }

    #[test]
    fn white_sector_is_an_index_set() {
        let (_, _, cs) = setup();
        let mut l = SectorLabel::free(4, 4);
        l.c_w = vec![Some(1); 4];
        let b = sector_basis(&cs, &l).unwrap();
        assert_eq!(b.dim(), 4096);
        assert!(b.is_index_set());
    }

    #[test]
    fn fully_fixed_sector_has_dimension_128() {
        let (_, _, cs) = setup();
        let b = sector_basis(&cs, &SectorLabel::all_plus(4, 4).with_loops(1, -1)).unwrap();
        assert_eq!(b.dim(), 128);
        for (i, ci) in b.columns().iter().enumerate().take(20) {
            let n: f64 = ci.iter().map(|(_, c)| c.norm_sqr()).sum();
            assert!((n - 1.0).abs() < 1e-12, "column {i}");
        }
    }

    #[test]
    fn dependency_violation_is_empty() {
        let (_, _, cs) = setup();
        let mut l = SectorLabel::all_plus(4, 4);
        l.c_g[0] = Some(-1);
        assert!(matches!(sector_basis(&cs, &l), Err(Error::EmptySector(_))));
    }

    #[test]
    fn labels_count() {
        let (_, _, cs) = setup();
        assert_eq!(all_fixed_labels(&cs).len(), 512);
    }

    #[test]
    fn zero_coupling_ground_energy() {
        let (lat, o, cs) = setup();
        let h = build_h(&lat, &ModelParams::new(1.0, 0.0), &o).unwrap();
        let b = sector_basis(&cs, &SectorLabel::all_plus(4, 4).with_loops(1, 1)).unwrap();
        let r = sector_spectrum(&h, &b, Some(3)).unwrap();
        assert!((r.sectors[0].values[0] + 8.0).abs() < 1e-10);
    }

    #[test]
    fn non_conserving_h_is_rejected() {
        let (_, _, cs) = setup();
        let b = sector_basis(&cs, &SectorLabel::all_plus(4, 4).with_loops(1, 1)).unwrap();
        let mut h = OperatorSum::zero(16);
        h.add_real(1.0, &PauliString::x(16, 0));
        assert!(matches!(restrict(&h, &b), Err(Error::NotBlockPreserving(_))));
    }

    #[test]
    fn csv_round_trip() {
        let mut r = SpectrumResult::default();
        r.push("w++/g++/l**".into(), vec![-1.0, -1.0, 0.5]);
        let back = SpectrumResult::from_csv(&r.to_csv()).unwrap();
        assert_eq!(back, r);
        assert_eq!(r.group_sizes(0), vec![2, 1]);
    }

    #[test]
    fn projecting_back_at_zero_field() {
        let (lat, _, _) = setup();
        let r = projecting_back_check(&lat, 0.0, 1.0).unwrap();
        assert!(r.violations().is_empty(), "{:?}", r.violations());
        assert_eq!((r.reference_levels, r.parity_levels, r.multiplicity), (4096, 32768, 8));
        assert_eq!(r.eigenstates, 32768);
        assert!((r.min_overlap - 0.125).abs() < 1e-12);
    }

    #[test]
    fn open_patch_levels_pair_up() {
        use crate::fermion::build_h;
        use crate::lattice::{build_open_patch, BoundaryLinks};
        let lat = build_open_patch(2, 2, BoundaryLinks::Corners).unwrap();
        let order = jw_order(&lat).unwrap();
        for (d, l) in [(1.0, 0.1), (1.0, 0.5), (0.3, 1.0), (2.0, 0.7), (1.5, 0.2)] {
            let levels = level_multiplicities(&build_h(&lat, &ModelParams::new(d, l), &order).unwrap()).unwrap();
            assert_eq!(levels.iter().map(|x| x.1).sum::<usize>(), 256);
            assert_eq!(levels[0].1, 2, "ground pair at ({d}, {l})");
            assert!(levels.iter().all(|x| x.1 % 2 == 0), "({d}, {l})");
        }
        let levels = level_multiplicities(&build_h(&lat, &ModelParams::new(0.0, 1.0), &order).unwrap()).unwrap();
        assert_eq!(levels[0].1, 4);
        assert!(levels.iter().all(|x| x.1 % 4 == 0));
    }
}
