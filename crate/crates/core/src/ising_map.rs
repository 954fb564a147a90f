//! Reduction of a white-plaquette sector to a family of signed transverse-field
//! Ising models.
//!
//! On a fixed `{c^w}` sector the top-right link string `Y Z Z Y` equals
//! `c^w X_N X_E`, which leaves a square-octagon qubit model: `+-Delta ZZ` on the
//! two qubits of each island and `lambda w XX` on every diagonal link.
//!
//! Within each white square either the N and S qubits or the W and E qubits
//! are labelled "1" (checkerboard over squares, so `L` must be even); every
//! diagonal link then joins a "1" qubit to a "2" qubit. After an `X` rotation
//! on the "2" qubit of each east/west island, the Bell change
//! `CNOT(1 -> 2)` then `H(1)` turns island `i` into a sign qubit `s_i` (the old
//! "1") and a bond qubit `t_i` (the old "2"), with
//! `X1 -> Z_s X_t`, `X2 -> X_t`, `Z1 Z2 -> Z_t`. A Hadamard on every `t` and an
//! `X` conjugation on the even-`x` sublattice give
//! `H = -Delta sum S^x - lambda sum sigma S^z S^z` with
//! `sigma = w (-1)^{s_i}`, `i` the "1" end of the link.

use std::collections::{BTreeMap, VecDeque};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fermion::{island_term, link_term, mode_product, ModeOrder, ModelParams};
use crate::ising_solver::TfimInstance;
use crate::lattice::{mode_id, mode_island, Boundary, Letter, SignedLattice, Slot};
use crate::pauli::{OperatorSum, PauliString};

/// Square-octagon qubit model on the Jordan-Wigner qubits.
#[derive(Clone, Debug, PartialEq)]
pub struct SquareOctagonModel {
    pub num_qubits: usize,
    pub delta: f64,
    pub lambda: f64,
    /// `(q1, q2, sign)`: term `sign * Delta * Z_q1 Z_q2`.
    pub island_links: Vec<(usize, usize, f64)>,
    /// `(q1, q2, w, link id)`: term `w * lambda * X_q1 X_q2`.
    pub diagonal_links: Vec<(usize, usize, f64, usize)>,
    pub c_w: Vec<i8>,
}

impl SquareOctagonModel {
    pub fn to_operator(&self) -> OperatorSum {
        let n = self.num_qubits;
        let mut h = OperatorSum::zero(n);
        for &(a, b, s) in &self.island_links {
            h.add_real(s * self.delta, &PauliString::from_sparse(n, &[(a, 'Z'), (b, 'Z')]));
        }
        for &(a, b, w, _) in &self.diagonal_links {
            h.add_real(w * self.lambda, &PauliString::from_sparse(n, &[(a, 'X'), (b, 'X')]));
        }
        h
    }
}

fn require_even_torus(lat: &SignedLattice) -> Result<()> {
    if lat.boundary() != Boundary::Torus {
        return Err(Error::Lattice("Ising reduction needs a torus".into()));
    }
    if !lat.size().is_multiple_of(2) {
        return Err(Error::OddSize(lat.size()));
    }
    Ok(())
}

/// Square-octagon model for the white-plaquette labels `c_w`.
pub fn square_octagon(
    lat: &SignedLattice,
    params: &ModelParams,
    order: &ModeOrder,
    c_w: &[i8],
) -> Result<SquareOctagonModel> {
    require_even_torus(lat)?;
    if c_w.len() != lat.white().len() || c_w.iter().any(|&c| c != 1 && c != -1) {
        return Err(Error::Config("c_w needs one +-1 entry per white plaquette".into()));
    }
    let n = order.num_qubits();
    let mut island_links = Vec::new();
    for i in 0..lat.num_islands() {
        let p = island_term(i, order);
        let (a, b) = crate::fermion::island_qubits(i, order);
        let zz = PauliString::from_sparse(n, &[(a, 'Z'), (b, 'Z')]);
        if p.unsigned() != zz {
            return Err(Error::Verification(format!("island {i} term is not ZZ")));
        }
        // -Delta * P with P = phase * ZZ
        island_links.push((a, b, -p.phase().re));
    }
    let mut diagonal_links = Vec::new();
    for (wi, w) in lat.white().iter().enumerate() {
        for (k, &id) in w.links.iter().enumerate() {
            if !lat.is_active(id) {
                continue;
            }
            let l = lat.link(id);
            let (qa, qb) = (order.qubit_of(l.first), order.qubit_of(l.second));
            let (qa, qb) = (qa.min(qb), qa.max(qb));
            let t = link_term(lat, id, order);
            let xx = PauliString::from_sparse(n, &[(qa, 'X'), (qb, 'X')]);
            let wgt = if Slot::ALL[k] == Slot::TopRight {
                // s * YZZY = s * C * XX with C the literal plaquette string
                let c = mode_product(&w.operator_modes(), order);
                let prod = c.mul(&xx)?;
                if prod.unsigned() != t.unsigned() {
                    return Err(Error::Verification("top-right link is not C * XX".into()));
                }
                let ratio = t.phase() / prod.phase();
                ratio.re * c_w[wi] as f64
            } else {
                if t.unsigned() != xx {
                    return Err(Error::Verification(format!("link {id} is not XX")));
                }
                t.phase().re
            };
            diagonal_links.push((qa, qb, wgt, id));
        }
    }
    Ok(SquareOctagonModel {
        num_qubits: n,
        delta: params.delta,
        lambda: params.lambda,
        island_links,
        diagonal_links,
        c_w: c_w.to_vec(),
    })
}

/// Conjugates `p` by a Clifford given by the images of `X_q` and `Z_q`.
fn conjugate(p: &PauliString, image: impl Fn(usize, bool) -> PauliString) -> PauliString {
    let n = p.num_qubits();
    let (x, z) = (p.x_mask(), p.z_mask());
    let k_internal = (p.word_phase() + (x & z).count_ones() as u8) & 3;
    let mut acc = PauliString::identity(n).with_phase(k_internal);
    for q in 0..n {
        if x >> q & 1 == 1 {
            acc = acc.mul_unchecked(&image(q, true));
        }
    }
    for q in 0..n {
        if z >> q & 1 == 1 {
            acc = acc.mul_unchecked(&image(q, false));
        }
    }
    acc
}

fn conj_x(p: &PauliString, target: usize) -> PauliString {
    let n = p.num_qubits();
    conjugate(p, |q, is_x| {
        let g = if is_x { PauliString::x(n, q) } else { PauliString::z(n, q) };
        if q == target && !is_x {
            g.negate()
        } else {
            g
        }
    })
}

fn conj_h(p: &PauliString, target: usize) -> PauliString {
    let n = p.num_qubits();
    conjugate(p, |q, is_x| match (q == target, is_x) {
        (true, true) => PauliString::z(n, q),
        (true, false) => PauliString::x(n, q),
        (false, true) => PauliString::x(n, q),
        (false, false) => PauliString::z(n, q),
    })
}

fn conj_cnot(p: &PauliString, c: usize, t: usize) -> PauliString {
    let n = p.num_qubits();
    conjugate(p, |q, is_x| {
        if is_x && q == c {
            PauliString::from_sparse(n, &[(c, 'X'), (t, 'X')])
        } else if !is_x && q == t {
            PauliString::from_sparse(n, &[(c, 'Z'), (t, 'Z')])
        } else if is_x {
            PauliString::x(n, q)
        } else {
            PauliString::z(n, q)
        }
    })
}

/// Bell-pair layout and the unitary frame taking the square-octagon model to Ising form.
#[derive(Clone, Debug, PartialEq)]
pub struct BellFrame {
    /// JW qubit labelled "1" on each island.
    pub ones: Vec<usize>,
    /// JW qubit labelled "2" on each island.
    pub twos: Vec<usize>,
    /// Islands whose "2" qubit gets an `X` rotation (east/west islands).
    pub rotated: Vec<bool>,
    /// Islands whose bond spin is flipped (even `x`).
    pub flipped: Vec<bool>,
    /// "1" end of each link.
    pub link_one: Vec<usize>,
}

pub fn bell_frame(lat: &SignedLattice, order: &ModeOrder) -> Result<BellFrame> {
    require_even_torus(lat)?;
    let m = lat.num_islands();
    let mut ones = vec![usize::MAX; m];
    let mut twos = vec![usize::MAX; m];
    let mut rotated = vec![false; m];
    for w in lat.white() {
        let (x, y) = w.pos;
        let ns_one = ((x / 2) + (y / 2)) % 2 == 0;
        for (slot, &isl) in w.islands.iter().enumerate() {
            let is_ns = slot % 2 == 0;
            // the island's qubit inside this octet is the one carrying its modes here
            let letter = [Letter::D, Letter::C, Letter::A, Letter::B][slot];
            let q = order.qubit_of(mode_id(isl, letter));
            let target = if is_ns == ns_one { &mut ones } else { &mut twos };
            if target[isl] != usize::MAX {
                return Err(Error::Lattice("Bell layout impossible: island labelled twice".into()));
            }
            target[isl] = q;
            if !is_ns {
                rotated[isl] = true;
            }
        }
    }
    if ones.iter().chain(&twos).any(|&q| q == usize::MAX) {
        return Err(Error::Lattice("Bell layout impossible".into()));
    }
    let flipped = (0..m).map(|i| lat.island_pos(i).0 % 2 == 0).collect();
    let link_one = lat
        .links()
        .iter()
        .map(|l| {
            let (a, b) = (mode_island(l.first), mode_island(l.second));
            let qa = order.qubit_of(l.first);
            if ones[a] == qa {
                a
            } else {
                b
            }
        })
        .collect();
    Ok(BellFrame { ones, twos, rotated, flipped, link_one })
}

impl BellFrame {
    pub fn num_islands(&self) -> usize {
        self.ones.len()
    }

    /// Image of a JW Pauli string on `2m` qubits: `s_i = i`, `t_i = m + i`.
    pub fn transform(&self, p: &PauliString) -> PauliString {
        let m = self.num_islands();
        let mut p = *p;
        for i in 0..m {
            if self.rotated[i] {
                p = conj_x(&p, self.twos[i]);
            }
        }
        for i in 0..m {
            p = conj_cnot(&p, self.ones[i], self.twos[i]);
            p = conj_h(&p, self.ones[i]);
        }
        let mut map = vec![0; p.num_qubits()];
        for i in 0..m {
            map[self.ones[i]] = i;
            map[self.twos[i]] = m + i;
        }
        let mut p = p.embed(2 * m, &map);
        for i in 0..m {
            p = conj_h(&p, m + i);
            if self.flipped[i] {
                p = conj_x(&p, m + i);
            }
        }
        p
    }

    pub fn transform_sum(&self, op: &OperatorSum) -> OperatorSum {
        let mut out = OperatorSum::zero(2 * self.num_islands());
        for (c, p) in op.iter() {
            out.add_term(c, &self.transform(&p));
        }
        out
    }
}

/// Edge signs of the Ising lattice, in canonical link order.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct GaugeConfig {
    pub sigma: Vec<i8>,
}

impl GaugeConfig {
    pub fn ferromagnetic(lat: &SignedLattice) -> Self {
        Self { sigma: vec![1; lat.links().len()] }
    }

    /// Flips every edge at a site.
    pub fn flip_site(&mut self, lat: &SignedLattice, site: usize) {
        for (id, l) in lat.links().iter().enumerate() {
            if mode_island(l.first) == site || mode_island(l.second) == site {
                self.sigma[id] = -self.sigma[id];
            }
        }
    }

    /// Ising instance `-lambda sum sigma S^z S^z - Delta sum S^x`.
    pub fn instance(&self, lat: &SignedLattice, delta: f64, lambda: f64, parity: Option<i8>) -> TfimInstance {
        let edges = lat
            .active_links()
            .map(|(id, l)| (mode_island(l.first), mode_island(l.second), lambda * self.sigma[id] as f64))
            .collect();
        TfimInstance { sites: lat.num_islands(), edges, field: delta, parity }
    }
}

/// Gauge-invariant data of a configuration.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct GaugeClass {
    /// One flag per gray plaquette, `'1'` when frustrated.
    pub frustrated: String,
    pub loops: (i8, i8),
}

impl GaugeClass {
    pub fn num_frustrated(&self) -> usize {
        self.frustrated.chars().filter(|&c| c == '1').count()
    }
}

fn face_product(sigma: &[i8], links: &[usize]) -> i8 {
    links.iter().map(|&l| sigma[l]).product()
}

pub fn frustration_analysis(lat: &SignedLattice, g: &GaugeConfig) -> Result<GaugeClass> {
    if g.sigma.len() != lat.links().len() {
        return Err(Error::InvalidGauge(format!("{} edge signs for {} links", g.sigma.len(), lat.links().len())));
    }
    for (i, w) in lat.white().iter().enumerate() {
        if face_product(&g.sigma, &w.links) != 1 {
            return Err(Error::InvalidGauge(format!("white square {i} has edge product -1")));
        }
    }
    let frustrated = lat.gray().iter().map(|p| if face_product(&g.sigma, &p.links) < 0 { '1' } else { '0' }).collect();
    let (a, b) = lat.homology_loops()?;
    Ok(GaugeClass { frustrated, loops: (face_product(&g.sigma, &a.links), face_product(&g.sigma, &b.links)) })
}

/// Representative with all edges of a breadth-first spanning tree set to `+1`.
pub fn gauge_canonical(lat: &SignedLattice, g: &GaugeConfig) -> GaugeConfig {
    let m = lat.num_islands();
    let mut adj: Vec<Vec<(usize, usize)>> = vec![Vec::new(); m];
    for (id, l) in lat.active_links() {
        let (a, b) = (mode_island(l.first), mode_island(l.second));
        adj[a].push((b, id));
        adj[b].push((a, id));
    }
    for a in adj.iter_mut() {
        a.sort();
    }
    let mut out = g.clone();
    let mut seen = vec![false; m];
    for root in 0..m {
        if seen[root] {
            continue;
        }
        seen[root] = true;
        let mut queue = VecDeque::from([root]);
        while let Some(u) = queue.pop_front() {
            for &(v, id) in &adj[u] {
                if !seen[v] {
                    seen[v] = true;
                    if out.sigma[id] < 0 {
                        out.flip_site(lat, v);
                    }
                    queue.push_back(v);
                }
            }
        }
    }
    out
}

/// One sign-qubit configuration of the family.
#[derive(Clone, Debug, PartialEq)]
pub struct FamilyMember {
    /// Sign qubit values, island `i` is bit `i`.
    pub signs: u64,
    pub gauge: GaugeConfig,
    pub class: GaugeClass,
}

#[derive(Clone, Debug, PartialEq)]
pub struct IsingFamily {
    pub delta: f64,
    pub lambda: f64,
    /// Required value of `prod S^x`.
    pub parity: i8,
    pub members: Vec<FamilyMember>,
}

impl IsingFamily {
    /// Members grouped by class, classes in sorted order.
    pub fn classes(&self) -> BTreeMap<GaugeClass, Vec<&FamilyMember>> {
        let mut out: BTreeMap<GaugeClass, Vec<&FamilyMember>> = BTreeMap::new();
        for m in &self.members {
            out.entry(m.class.clone()).or_default().push(m);
        }
        out
    }
}

fn split_sign_part(p: &PauliString, m: usize) -> Result<(u128, PauliString)> {
    let s_mask = (1u128 << m) - 1;
    if p.x_mask() & s_mask != 0 {
        return Err(Error::Verification("sign qubits are not conserved".into()));
    }
    let t = PauliString::from_masks(m, p.x_mask() >> m, p.z_mask() >> m, 0);
    Ok((p.z_mask() & s_mask, t))
}

/// Transforms the square-octagon model to Ising form and enumerates sign qubits.
pub fn bell_reduce(lat: &SignedLattice, order: &ModeOrder, model: &SquareOctagonModel) -> Result<IsingFamily> {
    let frame = bell_frame(lat, order)?;
    let m = frame.num_islands();
    if m > 20 {
        return Err(Error::Capacity { what: "sign qubits", got: m, limit: 20 });
    }
    let n = model.num_qubits;
    // field terms: each island link must become -Delta S^x
    for &(a, b, s) in &model.island_links {
        let p = frame.transform(&PauliString::from_sparse(n, &[(a, 'Z'), (b, 'Z')]));
        let (smask, t) = split_sign_part(&p, m)?;
        let coef = s * p.phase().re;
        if smask != 0 || t.weight() != 1 || t.x_mask() == 0 || (coef + 1.0).abs() > 1e-12 {
            return Err(Error::Verification(format!("island link ({a}, {b}) does not map to -S^x")));
        }
    }
    // edge terms: w XX -> -(sigma) S^z S^z with sigma = w * (+-1) * (-1)^{s-part}
    let mut edges: Vec<(usize, u128, f64)> = Vec::new();
    for &(a, b, w, id) in &model.diagonal_links {
        let p = frame.transform(&PauliString::from_sparse(n, &[(a, 'X'), (b, 'X')]));
        let (smask, t) = split_sign_part(&p, m)?;
        if t.weight() != 2 || t.x_mask() != 0 || smask.count_ones() != 1 {
            return Err(Error::Verification(format!("link {id} does not map to Z_s S^z S^z")));
        }
        edges.push((id, smask, -w * p.phase().re));
    }
    // parity: product of island parities in terms of the white labels
    let all_white = lat
        .white()
        .iter()
        .fold(PauliString::identity(n), |acc, w| acc.mul_unchecked(&mode_product(&w.operator_modes(), order)));
    let all_islands = (0..m).fold(PauliString::identity(n), |acc, i| acc.mul_unchecked(&island_term(i, order)));
    if all_white.unsigned() != all_islands.unsigned() {
        return Err(Error::Verification("white plaquettes do not multiply to the total parity".into()));
    }
    let r = (all_white.phase() / all_islands.phase()).re;
    let label: f64 = model.c_w.iter().map(|&c| c as f64).product();
    let q = frame.transform(&all_islands);
    let (smask, t) = split_sign_part(&q, m)?;
    if smask != 0 || t.z_mask() != 0 || t.x_mask().count_ones() as usize != m {
        return Err(Error::Verification("total parity does not map to prod S^x".into()));
    }
    let parity = (r * label * q.phase().re).round() as i8;

    let members = (0u64..1 << m)
        .map(|signs| {
            let mut sigma = vec![1i8; lat.links().len()];
            for &(id, smask, v) in &edges {
                let flip = if (signs as u128) & smask != 0 { -1.0 } else { 1.0 };
                sigma[id] = (v * flip).round() as i8;
            }
            let gauge = GaugeConfig { sigma };
            let class = frustration_analysis(lat, &gauge)?;
            Ok(FamilyMember { signs, gauge, class })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(IsingFamily { delta: model.delta, lambda: model.lambda, parity, members })
}

/// Frame image of an operator sum, for operator-level comparisons.
pub fn transformed_model(lat: &SignedLattice, order: &ModeOrder, model: &SquareOctagonModel) -> Result<OperatorSum> {
    Ok(bell_frame(lat, order)?.transform_sum(&model.to_operator()))
}

/// Antiferromagnetic seam: flips the edges crossed by a non-contractible dual
/// path, leaving every face product unchanged and one Wilson loop at `-1`.
/// `vertical` picks the path running along `y` (it crosses the `(1, 0)` loop).
pub fn seam(lat: &SignedLattice, vertical: bool) -> Result<GaugeConfig> {
    require_even_torus(lat)?;
    let p = 2 * lat.size() as i32;
    let at = |pos: (i32, i32)| {
        let pos = (pos.0.rem_euclid(p), pos.1.rem_euclid(p));
        lat.plaquettes().find(|q| q.pos == pos).expect("plaquette")
    };
    let mut g = GaugeConfig::ferromagnetic(lat);
    for k in 0..p {
        let (a, b) = if vertical { ((k % 2, k), ((k + 1) % 2, k + 1)) } else { ((k, k % 2), (k + 1, (k + 1) % 2)) };
        let (pa, pb) = (at(a), at(b));
        let shared =
            pa.links.iter().find(|l| pb.links.contains(l)).ok_or_else(|| Error::Lattice("dual path broken".into()))?;
        g.sigma[*shared] = -g.sigma[*shared];
    }
    Ok(g)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fermion::jw_order;
    use crate::lattice::build_lattice;

    fn torus() -> SignedLattice {
        build_lattice(2, Boundary::Torus).unwrap()
    }

    #[test]
    fn clifford_images() {
        let n = 2;
        let x1 = PauliString::x(n, 0);
        assert_eq!(conj_cnot(&x1, 0, 1), PauliString::from_sparse(n, &[(0, 'X'), (1, 'X')]));
        let yy = PauliString::from_sparse(n, &[(0, 'Y'), (1, 'Y')]);
        assert_eq!(conj_cnot(&yy, 0, 1), PauliString::from_sparse(n, &[(0, 'X'), (1, 'Z')]).negate());
        assert_eq!(conj_h(&PauliString::y(1, 0), 0), PauliString::y(1, 0).negate());
        assert_eq!(conj_x(&PauliString::y(1, 0), 0), PauliString::y(1, 0).negate());
    }

    #[test]
    fn odd_size_is_rejected() {
        let lat = build_lattice(3, Boundary::Torus).unwrap();
        let o = jw_order(&lat).unwrap();
        assert!(matches!(square_octagon(&lat, &ModelParams::new(1.0, 0.1), &o, &[1; 9]), Err(Error::OddSize(3))));
    }

    #[test]
    fn square_octagon_structure() {
        let lat = torus();
        let o = jw_order(&lat).unwrap();
        let m = square_octagon(&lat, &ModelParams::new(1.0, 0.2), &o, &[1; 4]).unwrap();
        let mut island = [0; 16];
        let mut diag = [0; 16];
        for &(a, b, _) in &m.island_links {
            island[a] += 1;
            island[b] += 1;
        }
        for &(a, b, w, _) in &m.diagonal_links {
            diag[a] += 1;
            diag[b] += 1;
            assert_eq!(w, 1.0);
        }
        assert!(island.iter().all(|&c| c == 1) && diag.iter().all(|&c| c == 2));
    }

    #[test]
    fn ferromagnet_has_trivial_class() {
        let lat = torus();
        let c = frustration_analysis(&lat, &GaugeConfig::ferromagnetic(&lat)).unwrap();
        assert_eq!(c.num_frustrated(), 0);
        assert_eq!(c.loops, (1, 1));
    }

    #[test]
    fn single_edge_flip_toggles_two_gray_faces() {
        let lat = torus();
        let mut g = GaugeConfig::ferromagnetic(&lat);
        g.sigma[0] = -1;
        g.sigma[1] = -1; // keeps the white product
        let c = frustration_analysis(&lat, &g).unwrap();
        assert_eq!(c.num_frustrated(), 2);
        g.sigma[1] = 1;
        assert!(matches!(frustration_analysis(&lat, &g), Err(Error::InvalidGauge(_))));
    }

    #[test]
    fn seam_flips_one_loop() {
        let lat = build_lattice(4, Boundary::Torus).unwrap();
        let c = frustration_analysis(&lat, &seam(&lat, true).unwrap()).unwrap();
        assert_eq!(c.num_frustrated(), 0);
        assert_eq!(c.loops, (-1, 1));
        let c = frustration_analysis(&lat, &seam(&lat, false).unwrap()).unwrap();
        assert_eq!(c.loops, (1, -1));
    }

    #[test]
    fn canonical_form_is_gauge_invariant() {
        let lat = torus();
        let g = seam(&lat, true).unwrap();
        let mut h = g.clone();
        h.flip_site(&lat, 3);
        h.flip_site(&lat, 6);
        assert_eq!(gauge_canonical(&lat, &g), gauge_canonical(&lat, &h));
        let fm = GaugeConfig::ferromagnetic(&lat);
        assert_eq!(gauge_canonical(&lat, &fm), fm);
    }

    #[test]
    fn sign_qubits_move_two_edges() {
        let lat = torus();
        let o = jw_order(&lat).unwrap();
        let so = square_octagon(&lat, &ModelParams::new(1.0, 0.2), &o, &[1; 4]).unwrap();
        let fam = bell_reduce(&lat, &o, &so).unwrap();
        assert_eq!(fam.members[0].gauge, GaugeConfig::ferromagnetic(&lat));
        for m in fam.members.iter().filter(|m| m.signs.count_ones() == 1) {
            let flipped: Vec<usize> = (0..16).filter(|&l| m.gauge.sigma[l] < 0).collect();
            assert_eq!(flipped.len(), 2);
            // both edges lie on one white square, and the gray faces at the island toggle
            assert!(lat.white().iter().any(|w| flipped.iter().all(|l| w.links.contains(l))));
            let site = m.signs.trailing_zeros() as usize;
            let grays: String = lat.gray().iter().map(|g| if g.islands.contains(&site) { '1' } else { '0' }).collect();
            assert_eq!(m.class.frustrated, grays);
        }
    }
}
