//! Transverse-field Ising models `H = -sum J_ij S^z_i S^z_j - h sum S^x_i`.
//!
//! With a parity constraint `prod S^x = p` the Hilbert space is spanned by
//! `(|s> + p |~s>) / sqrt 2` with `s` ranging over configurations whose last
//! spin is up, so the constrained problem has dimension `2^(n-1)`.

use nalgebra::{DMatrix, DVector};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fermion::{build_h, conserved_set, jw_order, ModelParams};
use crate::ising_map::{bell_reduce, frustration_analysis, square_octagon, GaugeClass, GaugeConfig};
use crate::lattice::SignedLattice;
use crate::linalg::{degeneracy_groups, eigh, eigvalsh, lanczos_lowest, LanczosOptions};
use crate::pauli::{OperatorSum, PauliString};
use crate::sector::{all_fixed_labels, spectra, SectorLabel, SpectrumResult, GROUP_ABS_TOL, GROUP_REL_TOL};

/// Largest spin count for dense diagonalization.
pub const DENSE_SITES: usize = 14;
/// Largest spin count for sparse diagonalization.
pub const SPARSE_SITES: usize = 24;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TfimInstance {
    pub sites: usize,
    /// `(i, j, J_ij)`.
    pub edges: Vec<(usize, usize, f64)>,
    /// Transverse field `h`.
    pub field: f64,
    /// Required value of `prod S^x`, if constrained.
    pub parity: Option<i8>,
}

impl TfimInstance {
    pub fn new(sites: usize, edges: Vec<(usize, usize, f64)>, field: f64) -> Self {
        Self { sites, edges, field, parity: None }
    }

    pub fn with_parity(mut self, p: i8) -> Self {
        self.parity = Some(p);
        self
    }

    pub fn operator(&self) -> OperatorSum {
        let n = self.sites;
        let mut h = OperatorSum::zero(n);
        for &(i, j, c) in &self.edges {
            h.add_real(-c, &PauliString::from_sparse(n, &[(i, 'Z'), (j, 'Z')]));
        }
        for i in 0..n {
            h.add_real(-self.field, &PauliString::x(n, i));
        }
        h
    }

    fn check(&self) -> Result<()> {
        if self.sites == 0 || self.sites > SPARSE_SITES {
            return Err(Error::Capacity { what: "spins", got: self.sites, limit: SPARSE_SITES });
        }
        if self.edges.iter().any(|&(i, j, _)| i >= self.sites || j >= self.sites || i == j) {
            return Err(Error::Config("edge endpoint out of range".into()));
        }
        if matches!(self.parity, Some(p) if p != 1 && p != -1) {
            return Err(Error::Config("parity must be +-1".into()));
        }
        Ok(())
    }

    /// Dimension of the (constrained) space.
    pub fn dim(&self) -> usize {
        match self.parity {
            Some(_) => 1 << (self.sites - 1),
            None => 1 << self.sites,
        }
    }

    /// Basis state of row `r`: the configuration `s` (bit `i` set = spin down).
    pub fn config(&self, r: usize) -> u64 {
        r as u64
    }

    fn diag(&self, s: u64) -> f64 {
        -self.edges.iter().map(|&(i, j, c)| if (s >> i ^ s >> j) & 1 == 0 { c } else { -c }).sum::<f64>()
    }

    /// Rows of the real symmetric matrix in the (constrained) basis.
    pub fn rows(&self) -> Result<Vec<Vec<(usize, f64)>>> {
        self.check()?;
        let n = self.sites;
        let all = (1u64 << n) - 1;
        let top = 1u64 << (n - 1);
        Ok((0..self.dim())
            .into_par_iter()
            .map(|r| {
                let s = r as u64;
                let mut row = vec![(r, self.diag(s))];
                for i in 0..n {
                    let t = s ^ (1 << i);
                    match self.parity {
                        Some(p) if t & top != 0 => row.push(((t ^ all) as usize, -self.field * p as f64)),
                        _ => row.push((t as usize, -self.field)),
                    }
                }
                row
            })
            .collect())
    }

    pub fn matvec(rows: &[Vec<(usize, f64)>], x: &DVector<f64>) -> DVector<f64> {
        let y: Vec<f64> = rows.par_iter().map(|row| row.iter().map(|&(c, v)| v * x[c]).sum()).collect();
        DVector::from_vec(y)
    }

    pub fn dense(&self) -> Result<DMatrix<f64>> {
        if self.sites > DENSE_SITES {
            return Err(Error::Capacity { what: "dense spins", got: self.sites, limit: DENSE_SITES });
        }
        let rows = self.rows()?;
        let d = self.dim();
        let mut m = DMatrix::zeros(d, d);
        for (r, row) in rows.iter().enumerate() {
            for &(c, v) in row {
                m[(r, c)] += v;
            }
        }
        Ok(m)
    }

    /// Full-space amplitudes of a constrained-basis vector.
    pub fn expand(&self, v: &DVector<f64>) -> Vec<f64> {
        let n = self.sites;
        match self.parity {
            None => v.iter().copied().collect(),
            Some(p) => {
                let all = (1u64 << n) - 1;
                let mut out = vec![0.0; 1 << n];
                let a = std::f64::consts::FRAC_1_SQRT_2;
                for (r, &x) in v.iter().enumerate() {
                    out[r] += a * x;
                    out[(r as u64 ^ all) as usize] += a * p as f64 * x;
                }
                out
            }
        }
    }
}

/// Lowest `k` eigenvalues (all when `None`), ascending.
pub fn tfim_eigenvalues(m: &TfimInstance, k: Option<usize>) -> Result<Vec<f64>> {
    let d = m.dim();
    let want = k.unwrap_or(d).min(d);
    if m.sites <= DENSE_SITES && (k.is_none() || d <= 512) {
        let mut v = eigvalsh(m.dense()?);
        v.truncate(want);
        return Ok(v);
    }
    if k.is_none() {
        return Err(Error::Capacity { what: "dense spins", got: m.sites, limit: DENSE_SITES });
    }
    let rows = m.rows()?;
    Ok(lanczos_lowest(|x: &DVector<f64>| TfimInstance::matvec(&rows, x), d, want, &LanczosOptions::default())?.values)
}

/// Ground energy and state (constrained basis).
pub fn tfim_ground(m: &TfimInstance) -> Result<(f64, DVector<f64>)> {
    if m.dim() <= 512 {
        let (v, vecs) = eigh(m.dense()?);
        return Ok((v[0], vecs.column(0).into_owned()));
    }
    let rows = m.rows()?;
    let r = lanczos_lowest(|x: &DVector<f64>| TfimInstance::matvec(&rows, x), m.dim(), 2, &LanczosOptions::default())?;
    Ok((r.values[0], r.vectors[0].clone()))
}

pub fn tfim_spectrum(m: &TfimInstance, k: Option<usize>, label: &str) -> Result<SpectrumResult> {
    let mut r = SpectrumResult::default();
    r.push(label.to_string(), tfim_eigenvalues(m, k)?);
    Ok(r)
}

/// Periodic `rows x cols` square-lattice ferromagnet, sites row-major.
///
/// A periodic direction of length 2 carries both bonds between the same pair,
/// as on a torus of that circumference.
pub fn square_tfim(rows: usize, cols: usize, coupling: f64, field: f64) -> TfimInstance {
    let at = |r: usize, c: usize| (r % rows) * cols + c % cols;
    let mut edges = Vec::new();
    for r in 0..rows {
        for c in 0..cols {
            if cols > 1 {
                edges.push((at(r, c), at(r, c + 1), coupling));
            }
            if rows > 1 {
                edges.push((at(r, c), at(r + 1, c), coupling));
            }
        }
    }
    TfimInstance::new(rows * cols, edges, field)
}

/// Periodic chain of `n` spins.
pub fn chain_tfim(n: usize, coupling: f64, field: f64) -> TfimInstance {
    square_tfim(1, n, coupling, field)
}

/// Ground energy in the `prod S^x = +1` sector.
pub fn ground_energy(m: &TfimInstance) -> Result<f64> {
    let m = m.clone().with_parity(1);
    Ok(tfim_eigenvalues(&m, Some(1))?[0])
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SeamPoint {
    pub rows: usize,
    /// Seam length: number of antiferromagnetic bonds.
    pub cols: usize,
    pub ratio: f64,
    pub fm_energy: f64,
    pub seam_energy: f64,
    pub splitting: f64,
}

/// `E0(seam) - E0(ferromagnet)` on a periodic `rows x cols` lattice with
/// `Delta = 1`. The seam reverses the `cols` vertical bonds between the last
/// and first rows, so it is crossed by every loop winding along the columns.
pub fn seam_splitting(rows: usize, cols: usize, ratio: f64) -> Result<SeamPoint> {
    if rows < 2 || cols < 1 {
        return Err(Error::Config(format!("seam needs at least 2 rows, got {rows}x{cols}")));
    }
    if rows * cols > SPARSE_SITES {
        return Err(Error::Capacity { what: "spins", got: rows * cols, limit: SPARSE_SITES });
    }
    let fm = square_tfim(rows, cols, ratio, 1.0);
    let mut seam = fm.clone();
    let last = (rows - 1) * cols;
    let mut flipped = 0;
    for e in seam.edges.iter_mut() {
        if e.0 >= last && e.1 < cols {
            e.2 = -e.2;
            flipped += 1;
        }
    }
    // a 2-row torus has two bonds per column pair; reverse only one
    debug_assert_eq!(flipped, cols);
    let fm_energy = ground_energy(&fm)?;
    let seam_energy = ground_energy(&seam)?;
    Ok(SeamPoint { rows, cols, ratio, fm_energy, seam_energy, splitting: seam_energy - fm_energy })
}

/// Log-linear fit `ln y = a + b x`; returns `(a, b, max relative deviation)`.
pub fn log_linear_fit(x: &[f64], y: &[f64]) -> Result<(f64, f64, f64)> {
    if x.len() < 2 || x.len() != y.len() || y.iter().any(|&v| !(v > 0.0)) {
        return Err(Error::Fit { need: 2, got: x.iter().zip(y).filter(|(_, &v)| v > 0.0).count() });
    }
    let n = x.len() as f64;
    let ly: Vec<f64> = y.iter().map(|v| v.ln()).collect();
    let (mx, my) = (x.iter().sum::<f64>() / n, ly.iter().sum::<f64>() / n);
    let sxy: f64 = x.iter().zip(&ly).map(|(a, b)| (a - mx) * (b - my)).sum();
    let sxx: f64 = x.iter().map(|a| (a - mx).powi(2)).sum();
    let b = sxy / sxx;
    let a = my - b * mx;
    let dev = x.iter().zip(y).map(|(&xi, &yi)| ((a + b * xi).exp() / yi - 1.0).abs()).fold(0.0, f64::max);
    Ok((a, b, dev))
}

/// Ground state and first even-sector gap along a coupling grid (`Delta = 1`).
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FidelityScan {
    pub rows: usize,
    pub cols: usize,
    pub ratios: Vec<f64>,
    pub energies: Vec<f64>,
    pub gaps: Vec<f64>,
    /// Fidelity susceptibility at grid midpoints.
    pub midpoints: Vec<f64>,
    pub susceptibility: Vec<f64>,
}

impl FidelityScan {
    /// Interior maximum of the susceptibility, refined by a parabola through
    /// the three points around it; `None` when the maximum sits on the grid edge.
    pub fn peak(&self) -> Option<f64> {
        parabolic_peak(&self.midpoints, &self.susceptibility, f64::total_cmp)
    }

    /// Interior minimum of the even-sector gap.
    pub fn gap_minimum(&self) -> Option<f64> {
        parabolic_peak(&self.ratios, &self.gaps, |a, b| b.total_cmp(a))
    }
}

fn parabolic_peak(x: &[f64], y: &[f64], cmp: impl Fn(&f64, &f64) -> std::cmp::Ordering) -> Option<f64> {
    let (i, _) = y.iter().enumerate().max_by(|a, b| cmp(a.1, b.1))?;
    if i == 0 || i + 1 >= y.len() {
        return None;
    }
    let (x0, x1, x2) = (x[i - 1], x[i], x[i + 1]);
    let (y0, y1, y2) = (y[i - 1], y[i], y[i + 1]);
    let den = (x0 - x1) * (x0 - x2) * (x1 - x2);
    let a = (x2 * (y1 - y0) + x1 * (y0 - y2) + x0 * (y2 - y1)) / den;
    let b = (x2 * x2 * (y0 - y1) + x1 * x1 * (y2 - y0) + x0 * x0 * (y1 - y2)) / den;
    if a == 0.0 {
        return Some(x1);
    }
    Some((-b / (2.0 * a)).clamp(x0, x2))
}

/// Scans `lambda / Delta` over `ratios` on a periodic lattice, in the even sector.
pub fn fidelity_scan(rows: usize, cols: usize, ratios: &[f64]) -> Result<FidelityScan> {
    if ratios.len() < 2 || ratios.windows(2).any(|w| !(w[1] > w[0])) {
        return Err(Error::Config("ratio grid must be increasing with at least 2 points".into()));
    }
    let mut states: Vec<DVector<f64>> = Vec::with_capacity(ratios.len());
    let mut energies = Vec::with_capacity(ratios.len());
    let mut gaps = Vec::with_capacity(ratios.len());
    for &g in ratios {
        let m = square_tfim(rows, cols, g, 1.0).with_parity(1);
        let (vals, vecs) = if m.dim() <= 512 {
            let (v, vecs) = eigh(m.dense()?);
            (v[..2].to_vec(), vecs.column(0).into_owned())
        } else {
            let rows = m.rows()?;
            let r = lanczos_lowest(
                |x: &DVector<f64>| TfimInstance::matvec(&rows, x),
                m.dim(),
                2,
                &LanczosOptions { tol: 1e-12, ..Default::default() },
            )?;
            (r.values, r.vectors[0].clone())
        };
        energies.push(vals[0]);
        gaps.push(vals[1] - vals[0]);
        states.push(vecs);
    }
    let mut midpoints = Vec::new();
    let mut susceptibility = Vec::new();
    for i in 0..ratios.len() - 1 {
        let d = ratios[i + 1] - ratios[i];
        let f = states[i].dot(&states[i + 1]).abs().min(1.0);
        midpoints.push(0.5 * (ratios[i] + ratios[i + 1]));
        susceptibility.push(-2.0 * f.ln() / (d * d) / (rows * cols) as f64);
    }
    Ok(FidelityScan { rows, cols, ratios: ratios.to_vec(), energies, gaps, midpoints, susceptibility })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CriticalEstimate {
    /// Susceptibility peak of the largest size.
    pub estimate: f64,
    /// Spread of the peaks over sizes.
    pub uncertainty: f64,
    pub scans: Vec<FidelityScan>,
}

/// Finite-size estimate of `(lambda / Delta)_c` from fidelity-susceptibility
/// peaks; sizes are `(rows, cols)`, listed from small to large.
pub fn critical_estimate(sizes: &[(usize, usize)], ratios: &[f64]) -> Result<CriticalEstimate> {
    if sizes.len() < 2 {
        return Err(Error::Fit { need: 2, got: sizes.len() });
    }
    let scans = sizes.iter().map(|&(r, c)| fidelity_scan(r, c, ratios)).collect::<Result<Vec<_>>>()?;
    let peaks: Vec<f64> = scans
        .iter()
        .map(|s| {
            s.peak().ok_or_else(|| Error::Verification(format!("no susceptibility peak on {}x{}", s.rows, s.cols)))
        })
        .collect::<Result<_>>()?;
    let hi = peaks.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let lo = peaks.iter().copied().fold(f64::INFINITY, f64::min);
    Ok(CriticalEstimate { estimate: *peaks.last().unwrap(), uncertainty: hi - lo, scans })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FrustrationEnergy {
    pub class: GaugeClass,
    /// `E0(sigma) - E0(ferromagnet)`.
    pub energy: f64,
    /// `energy / (lambda^4 / Delta^3)` per frustrated plaquette, when any.
    pub scaled: Option<f64>,
}

/// Frustration cost of a gauge configuration on the mapped lattice in the
/// `prod S^x = +1` sector, for the paramagnetic regime.
pub fn pm_effective_gauge(
    lat: &SignedLattice,
    sigma: &GaugeConfig,
    delta: f64,
    lambda: f64,
) -> Result<FrustrationEnergy> {
    if !(delta > 0.0) || !(lambda >= 0.0) || lambda / delta > 0.15 {
        return Err(Error::Config(format!("needs 0 <= lambda/Delta <= 0.15, got {lambda}/{delta}")));
    }
    let class = frustration_analysis(lat, sigma)?;
    let e = |g: &GaugeConfig| -> Result<f64> {
        Ok(tfim_eigenvalues(&g.instance(lat, delta, lambda, Some(1)), Some(1))?[0])
    };
    let energy = e(sigma)? - e(&GaugeConfig::ferromagnetic(lat))?;
    let k = class.num_frustrated();
    let scaled = (k > 0 && lambda > 0.0).then(|| energy / (lambda.powi(4) / delta.powi(3)) / k as f64);
    Ok(FrustrationEnergy { class, energy, scaled })
}

/// Fermion-versus-Ising spectral comparison on the `c^w = +1` sectors.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EquivalenceReport {
    pub delta: f64,
    pub lambda: f64,
    pub fermion_levels: usize,
    pub ising_levels: usize,
    /// Gauge classes and how many times each enters the union.
    pub classes: Vec<(GaugeClass, usize)>,
    /// Largest gap between sorted level lists; infinite on a count mismatch.
    pub max_deviation: f64,
    /// Fermion ground degeneracy over all fixed sectors with `c^w = +1`.
    pub ground_degeneracy: usize,
}

impl EquivalenceReport {
    pub fn counts_match(&self) -> bool {
        self.fermion_levels == self.ising_levels
    }
}

/// Compares the fermionic spectrum with the union of parity-constrained Ising
/// spectra, one per gauge class.
///
/// Each class enters the union `members * sectors / 2^m` times, which is
/// computed from the family rather than assumed.
pub fn equivalence_check(lat: &SignedLattice, delta: f64, lambda: f64) -> Result<EquivalenceReport> {
    let params = ModelParams::new(delta, lambda);
    params.validate()?;
    let order = jw_order(lat)?;
    let cs = conserved_set(lat, &order)?;
    let nw = lat.white().len();
    let so = square_octagon(lat, &params, &order, &vec![1; nw])?;
    let family = bell_reduce(lat, &order, &so)?;
    let m = lat.num_islands();
    if m > DENSE_SITES {
        return Err(Error::Capacity { what: "dense spins", got: m, limit: DENSE_SITES });
    }

    let labels: Vec<SectorLabel> =
        all_fixed_labels(&cs).into_iter().filter(|l| l.c_w.iter().all(|&c| c == Some(1))).collect();
    let h = build_h(lat, &params, &order)?;
    let fermion = spectra(&h, &cs, &labels, None)?.merged();

    let members = family.members.len();
    let mut classes = Vec::new();
    let mut ising = Vec::new();
    for (class, reps) in family.classes() {
        let copies = reps.len() * labels.len();
        if !copies.is_multiple_of(members) {
            return Err(Error::Verification(format!("class {class:?} has {} members", reps.len())));
        }
        let copies = copies / members;
        let inst = reps[0].gauge.instance(lat, delta, lambda, Some(family.parity));
        let v = tfim_eigenvalues(&inst, None)?;
        for _ in 0..copies {
            ising.extend_from_slice(&v);
        }
        classes.push((class, copies));
    }
    ising.sort_by(f64::total_cmp);

    let max_deviation = if fermion.len() == ising.len() {
        fermion.iter().zip(&ising).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max)
    } else {
        f64::INFINITY
    };
    let groups = degeneracy_groups(&fermion, GROUP_REL_TOL, GROUP_ABS_TOL);
    let ground_degeneracy = groups.iter().take_while(|&&g| g == 0).count();
    Ok(EquivalenceReport {
        delta,
        lambda,
        fermion_levels: fermion.len(),
        ising_levels: ising.len(),
        classes,
        max_deviation,
        ground_degeneracy,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::pauli::dense_matrix_of;
    use std::collections::BTreeMap;

    fn ring(n: usize, j: f64, h: f64) -> TfimInstance {
        TfimInstance::new(n, (0..n).map(|i| (i, (i + 1) % n, j)).collect(), h)
    }

    #[test]
    fn zero_coupling_ground() {
        let m = ring(6, 0.0, 1.0).with_parity(1);
        let v = tfim_eigenvalues(&m, Some(2)).unwrap();
        assert!((v[0] + 6.0).abs() < 1e-12 && (v[1] + 6.0).abs() > 1.0);
    }

    #[test]
    fn parity_blocks_partition_the_spectrum() {
        let m = ring(5, 0.7, 0.4);
        let mut full = eigvalsh(dense_matrix_of(&m.operator()).unwrap().map(|c| c.re));
        let mut blocks = tfim_eigenvalues(&m.clone().with_parity(1), None).unwrap();
        blocks.extend(tfim_eigenvalues(&m.clone().with_parity(-1), None).unwrap());
        blocks.sort_by(f64::total_cmp);
        full.sort_by(f64::total_cmp);
        for (a, b) in full.iter().zip(&blocks) {
            assert!((a - b).abs() < 1e-10);
        }
        let unconstrained = tfim_eigenvalues(&m, None).unwrap();
        for (a, b) in full.iter().zip(&unconstrained) {
            assert!((a - b).abs() < 1e-10);
        }
    }

    #[test]
    fn classical_ferromagnet_with_parity_is_unique() {
        let m = ring(6, 1.0, 0.0).with_parity(1);
        let v = tfim_eigenvalues(&m, None).unwrap();
        assert!((v[0] + 6.0).abs() < 1e-12);
        assert!(v[1] > v[0] + 1.0);
    }

    #[test]
    fn fermion_spectrum_is_a_union_of_ising_classes() {
        let lat = crate::lattice::build_lattice(2, crate::lattice::Boundary::Torus).unwrap();
        for (d, l) in [(1.0, 0.2), (1.0, 0.0), (0.0, 1.0)] {
            let r = equivalence_check(&lat, d, l).unwrap();
            assert!(r.counts_match(), "{} vs {}", r.fermion_levels, r.ising_levels);
            assert_eq!(r.fermion_levels, 4096);
            assert_eq!(r.classes.len(), 32);
            assert!(r.classes.iter().all(|c| c.1 == 1));
            assert!(r.max_deviation <= 1e-8, "({d}, {l}): {}", r.max_deviation);
            if d == 0.0 {
                assert_eq!(r.ground_degeneracy, 1);
            }
        }
    }

    fn free_fermion_ks(n: usize) -> Vec<f64> {
        (0..n / 2).map(|j| (2 * j + 1) as f64 * std::f64::consts::PI / n as f64).collect()
    }

    /// Even-sector ground energy of the periodic chain from its free-fermion form.
    fn free_fermion_energy(n: usize, j: f64, h: f64) -> f64 {
        -2.0 * free_fermion_ks(n).iter().map(|k| (j * j + h * h - 2.0 * j * h * k.cos()).sqrt()).sum::<f64>()
    }

    fn bogoliubov(k: f64, j: f64, h: f64) -> f64 {
        0.5 * (j * k.sin()).atan2(h - j * k.cos())
    }

    #[test]
    fn chain_matches_free_fermions() {
        let n = 12;
        for g in [0.3, 1.0, 1.7] {
            let e = ground_energy(&chain_tfim(n, g, 1.0)).unwrap();
            assert!((e - free_fermion_energy(n, g, 1.0)).abs() < 1e-9);
        }
        let grid = [0.8, 0.85, 0.9];
        let s = fidelity_scan(1, n, &grid).unwrap();
        for (i, w) in grid.windows(2).enumerate() {
            let f: f64 = free_fermion_ks(n)
                .iter()
                .map(|&k| (bogoliubov(k, w[0], 1.0) - bogoliubov(k, w[1], 1.0)).cos().abs())
                .product();
            let chi = -2.0 * f.ln() / (w[1] - w[0]).powi(2) / n as f64;
            assert!((chi - s.susceptibility[i]).abs() < 1e-6 * chi, "{chi} vs {}", s.susceptibility[i]);
        }
    }

    #[test]
    fn chain_critical_point() {
        let grid: Vec<f64> = (0..=40).map(|i| 0.7 + 0.015 * i as f64).collect();
        let peak = fidelity_scan(1, 12, &grid).unwrap().peak().unwrap();
        assert!((peak - 1.0).abs() < 0.15, "{peak}");
        let far: Vec<f64> = (0..=10).map(|i| 0.01 * i as f64).collect();
        assert_eq!(fidelity_scan(3, 3, &far).unwrap().peak(), None);
        assert!(matches!(critical_estimate(&[(3, 3)], &grid), Err(Error::Fit { .. })));
    }

    #[test]
    fn seam_is_invisible_without_coupling() {
        for n in 2..=3 {
            assert_eq!(seam_splitting(n, n, 0.0).unwrap().splitting, 0.0);
        }
        let s: Vec<f64> = (2..=3).map(|n| seam_splitting(n, n, 0.15).unwrap().splitting).collect();
        assert!(s[0] > s[1] && s[1] > 0.0);
        assert!(matches!(seam_splitting(5, 5, 0.1), Err(Error::Capacity { .. })));
    }

    #[test]
    fn log_linear_fit_recovers_exponential() {
        let x = [1.0, 2.0, 3.0];
        let y: Vec<f64> = x.iter().map(|v: &f64| 3.0 * (-0.5 * v).exp()).collect();
        let (a, b, dev) = log_linear_fit(&x, &y).unwrap();
        assert!((a - 3f64.ln()).abs() < 1e-12 && (b + 0.5).abs() < 1e-12 && dev < 1e-12);
    }

    fn l2_family(ratio: f64) -> (SignedLattice, crate::ising_map::IsingFamily) {
        let lat = crate::lattice::build_lattice(2, crate::lattice::Boundary::Torus).unwrap();
        let o = jw_order(&lat).unwrap();
        let so = square_octagon(&lat, &ModelParams::new(1.0, ratio), &o, &[1; 4]).unwrap();
        let fam = bell_reduce(&lat, &o, &so).unwrap();
        (lat, fam)
    }

    #[test]
    fn frustration_cost_is_quartic() {
        let (lat, fam) = l2_family(0.1);
        let fm = pm_effective_gauge(&lat, &GaugeConfig::ferromagnetic(&lat), 1.0, 0.1).unwrap();
        assert_eq!(fm.energy, 0.0);
        assert_eq!(fm.scaled, None);
        let pair = fam.members.iter().find(|m| m.class.num_frustrated() == 2 && m.class.loops == (1, 1)).unwrap();
        let lo = pm_effective_gauge(&lat, &pair.gauge, 1.0, 0.05).unwrap().energy;
        let hi = pm_effective_gauge(&lat, &pair.gauge, 1.0, 0.1).unwrap().energy;
        assert!((hi / lo / 16.0 - 1.0).abs() < 0.25, "{}", hi / lo);
        assert!(pm_effective_gauge(&lat, &pair.gauge, 1.0, 0.3).is_err());
    }

    #[test]
    fn frustration_ordering_with_trivial_loops() {
        let (lat, fam) = l2_family(0.08);
        let mut by_count: BTreeMap<usize, (f64, f64)> = BTreeMap::new();
        for (class, reps) in fam.classes() {
            if class.loops != (1, 1) {
                continue;
            }
            let e = pm_effective_gauge(&lat, &reps[0].gauge, 1.0, 0.08).unwrap().energy;
            let r = by_count.entry(class.num_frustrated()).or_insert((f64::INFINITY, f64::NEG_INFINITY));
            *r = (r.0.min(e), r.1.max(e));
        }
        let ranges: Vec<(f64, f64)> = by_count.values().copied().collect();
        assert_eq!(by_count.keys().copied().collect::<Vec<_>>(), vec![0, 2, 4]);
        for w in ranges.windows(2) {
            assert!(w[0].1 < w[1].0, "{ranges:?}");
        }
    }

    #[test]
    fn frustrated_classes_lie_above_the_ferromagnet() {
        let (lat, fam) = l2_family(0.1);
        let mut fm = f64::NAN;
        let mut frustrated = f64::INFINITY;
        for (class, reps) in fam.classes() {
            let inst = reps[0].gauge.instance(&lat, 1.0, 0.1, Some(fam.parity));
            let e = tfim_eigenvalues(&inst, Some(1)).unwrap()[0];
            if class.num_frustrated() == 0 && class.loops == (1, 1) {
                fm = e;
            } else if class.num_frustrated() > 0 {
                frustrated = frustrated.min(e);
            }
            // any representative gives the same spectrum
            let other = reps.last().unwrap().gauge.instance(&lat, 1.0, 0.1, Some(fam.parity));
            assert!((tfim_eigenvalues(&other, Some(1)).unwrap()[0] - e).abs() < 1e-10);
        }
        assert!(frustrated > fm + 1e-6);
    }

    #[test]
    fn constrained_ground_state_has_even_parity() {
        let m = square_tfim(2, 3, 0.7, 1.0).with_parity(1);
        let (_, v) = tfim_ground(&m).unwrap();
        let full = m.expand(&v);
        let all = (1usize << 6) - 1;
        let res: f64 = (0..full.len()).map(|s| (full[s] - full[s ^ all]).powi(2)).sum::<f64>().sqrt();
        assert!(res < 1e-10);
    }

    #[test]
    fn capacity() {
        let m = TfimInstance::new(25, vec![], 1.0);
        assert!(matches!(tfim_eigenvalues(&m, Some(1)), Err(Error::Capacity { .. })));
    }
}
