//! Stabilizer form of the fourth-order effective Hamiltonian: one qubit per
//! island and `A = Z_N X_E Z_S X_W` on every plaquette whose four links are
//! present.

use std::collections::BTreeSet;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::lattice::{build_lattice, mode_island, mode_letter, Boundary, Color, Letter, SignedLattice};
use crate::pauli::{gf2_rank, OperatorSum, PauliString};

/// Largest plaquette count for exhaustive syndrome enumeration.
pub const SYNDROME_LIMIT: usize = 24;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct StabilizerTerm {
    pub pos: (i32, i32),
    pub color: Color,
    /// Islands `[N, E, S, W]`, which are also the qubit indices.
    pub islands: [usize; 4],
    /// Sign of the term relative to the default link signs.
    pub sign: i8,
}

impl StabilizerTerm {
    pub fn pauli(&self, n: usize) -> PauliString {
        let [north, east, south, west] = self.islands;
        PauliString::from_sparse(n, &[(north, 'Z'), (east, 'X'), (south, 'Z'), (west, 'X')])
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct StabilizerModel {
    pub num_qubits: usize,
    pub terms: Vec<StabilizerTerm>,
    /// Positions of plaquettes left out because a link is missing.
    pub removed: Vec<(i32, i32)>,
}

impl StabilizerModel {
    /// Signed generators `s A`.
    pub fn generators(&self) -> Vec<PauliString> {
        self.terms
            .iter()
            .map(|t| {
                let p = t.pauli(self.num_qubits);
                if t.sign < 0 {
                    p.negate()
                } else {
                    p
                }
            })
            .collect()
    }

    /// `-sum s A`, one unit per plaquette.
    pub fn hamiltonian(&self) -> OperatorSum {
        let mut h = OperatorSum::zero(self.num_qubits);
        for g in self.generators() {
            h.add_real(-1.0, &g);
        }
        h
    }

    /// Generators with all signs `+1`; used for degeneracy counting, which
    /// is sign independent whenever the signed group is consistent.
    pub fn unsigned_generators(&self) -> Vec<PauliString> {
        self.terms.iter().map(|t| t.pauli(self.num_qubits)).collect()
    }
}

/// Stabilizer model of a lattice: plaquettes with a missing link are dropped,
/// signs are taken relative to the default sign assignment.
pub fn stabilizers_of(lat: &SignedLattice) -> Result<StabilizerModel> {
    if lat.num_islands() > 128 {
        return Err(Error::Capacity { what: "qubits", got: lat.num_islands(), limit: 128 });
    }
    let reference = match lat.boundary() {
        Boundary::Torus => build_lattice(lat.size(), Boundary::Torus)?,
        Boundary::Open => lat.clone().assign_link_signs(&crate::lattice::SignMode::Default)?,
    };
    let mut terms = Vec::new();
    let mut removed = Vec::new();
    for (p, q) in lat.plaquettes().zip(reference.plaquettes()) {
        if p.links.iter().all(|&l| lat.is_active(l)) {
            let sign = lat.plaquette_sign(p) * reference.plaquette_sign(q);
            terms.push(StabilizerTerm { pos: p.pos, color: p.color, islands: p.islands, sign });
        } else {
            removed.push(p.pos);
        }
    }
    Ok(StabilizerModel { num_qubits: lat.num_islands(), terms, removed })
}

/// Torus of size `l` with a white hole cut around each listed white plaquette.
pub fn toric_stabilizers(l: usize, white_holes: &[usize]) -> Result<StabilizerModel> {
    if l < 2 {
        return Err(Error::Lattice(format!("toric code needs L >= 2, got {l}")));
    }
    let lat = hole_lattice(l, white_holes)?;
    stabilizers_of(&lat)
}

/// Torus with the four links of each listed white plaquette removed.
pub fn hole_lattice(l: usize, white_holes: &[usize]) -> Result<SignedLattice> {
    let lat = build_lattice(l, Boundary::Torus)?;
    let mut touched: BTreeSet<(i32, i32)> = BTreeSet::new();
    let mut links = Vec::new();
    for &w in white_holes {
        if w >= lat.white().len() {
            return Err(Error::Lattice(format!("white plaquette {w} out of range")));
        }
        let cut = lat.white_hole_links(w);
        for p in lat.plaquettes().filter(|p| p.links.iter().any(|l| cut.contains(l))) {
            if !touched.insert(p.pos) {
                return Err(Error::Lattice(format!("holes overlap at plaquette {:?}", p.pos)));
            }
        }
        links.extend(cut);
    }
    lat.with_holes(links)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Degeneracy {
    pub rank: usize,
    pub log2: usize,
}

impl Degeneracy {
    pub fn value(&self) -> u128 {
        1u128 << self.log2
    }
}

pub fn degeneracy(m: &StabilizerModel) -> Result<Degeneracy> {
    let r = gf2_rank(&m.generators())?;
    Ok(Degeneracy { rank: r.rank, log2: r.log2_degeneracy })
}

// bit rows over 2n <= 256 variables; variable v lives in word v / 128
type Sym = [u128; 2];

fn sym_of(p: &PauliString) -> (u128, u128) {
    (p.x_mask(), p.z_mask())
}

fn sym_product(a: &PauliString, b: &PauliString) -> bool {
    let (ax, az) = sym_of(a);
    let (bx, bz) = sym_of(b);
    ((ax & bz).count_ones() + (az & bx).count_ones()) % 2 == 1
}

/// Basis of all Pauli strings commuting with every generator.
fn centralizer(n: usize, gens: &[PauliString]) -> Vec<PauliString> {
    // variable v < n is x_v, v >= n is z_{v-n}; constraint row for g is (g_z | g_x)
    let var = |row: &Sym, v: usize| -> bool { row[v / 128] >> (v % 128) & 1 == 1 };
    let mut rows: Vec<Sym> = gens
        .iter()
        .map(|g| {
            let (x, z) = sym_of(g);
            let mut r = [0u128; 2];
            for q in 0..n {
                if z >> q & 1 == 1 {
                    r[q / 128] |= 1 << (q % 128);
                }
                if x >> q & 1 == 1 {
                    let v = n + q;
                    r[v / 128] |= 1 << (v % 128);
                }
            }
            r
        })
        .collect();
    let mut pivot_cols = Vec::new();
    let mut rank = 0;
    for col in 0..2 * n {
        let Some(p) = (rank..rows.len()).find(|&i| var(&rows[i], col)) else { continue };
        rows.swap(rank, p);
        let pr = rows[rank];
        for (i, r) in rows.iter_mut().enumerate() {
            if i != rank && var(r, col) {
                r[0] ^= pr[0];
                r[1] ^= pr[1];
            }
        }
        pivot_cols.push(col);
        rank += 1;
    }
    let free: Vec<usize> = (0..2 * n).filter(|c| !pivot_cols.contains(c)).collect();
    free.iter()
        .map(|&f| {
            let mut v = vec![false; 2 * n];
            v[f] = true;
            for (i, &pc) in pivot_cols.iter().enumerate() {
                if var(&rows[i], f) {
                    v[pc] = true;
                }
            }
            let x = (0..n).filter(|&q| v[q]).fold(0u128, |m, q| m | 1 << q);
            let z = (0..n).filter(|&q| v[n + q]).fold(0u128, |m, q| m | 1 << q);
            PauliString::from_masks(n, x, z, 0)
        })
        .collect()
}

/// Greedy weight reduction by stabilizer multiplication.
fn shorten(p: PauliString, gens: &[PauliString]) -> PauliString {
    let mut best = p.unsigned();
    loop {
        let mut improved = false;
        for g in gens {
            let q = best.mul_unchecked(g).unsigned();
            if q.weight() < best.weight() {
                best = q;
                improved = true;
            }
        }
        if !improved {
            return best;
        }
    }
}

/// Logical Pauli pairs: each pair anticommutes, everything else commutes,
/// and all commute with the stabilizers. Representatives are shortened by
/// multiplying with stabilizer generators.
pub fn logical_ops(m: &StabilizerModel) -> Result<Vec<(PauliString, PauliString)>> {
    let gens = m.unsigned_generators();
    let d = degeneracy(m)?;
    let mut pool = centralizer(m.num_qubits, &gens);
    let mut pairs = Vec::new();
    while let Some(i) = pool.iter().position(|v| pool.iter().any(|w| sym_product(v, w))) {
        let v = pool.swap_remove(i);
        let j = pool.iter().position(|w| sym_product(&v, w)).unwrap();
        let w = pool.swap_remove(j);
        for u in pool.iter_mut() {
            let mut t = *u;
            if sym_product(&t, &w) {
                t = t.mul_unchecked(&v);
            }
            if sym_product(&t, &v) {
                t = t.mul_unchecked(&w);
            }
            *u = t.unsigned();
        }
        pairs.push((v, w));
    }
    if pairs.len() != d.log2 {
        return Err(Error::Verification(format!("{} logical pairs for {} logical qubits", pairs.len(), d.log2)));
    }
    // shortening by stabilizers keeps the symplectic pairing intact
    Ok(pairs.into_iter().map(|(a, b)| (shorten(a, &gens), shorten(b, &gens))).collect())
}

/// True when `p` is a product of the generators, up to phase.
pub fn in_stabilizer_group(m: &StabilizerModel, p: &PauliString) -> Result<bool> {
    let gens = m.unsigned_generators();
    let base = gf2_rank(&gens)?.rank;
    let mut with = gens.clone();
    with.push(p.unsigned());
    Ok(match gf2_rank(&with) {
        Ok(r) => r.rank == base,
        Err(Error::InconsistentSigns) => true,
        Err(e) => return Err(e),
    })
}

/// Degeneracy bookkeeping for a single white hole on the torus.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct HoleReport {
    pub size: usize,
    pub white: usize,
    pub removed: Vec<(i32, i32)>,
    pub baseline: u128,
    pub degeneracy: u128,
    /// Rim islands `[N, E, S, W]` of the hole.
    pub rim: [usize; 4],
    /// Independent logicals among the rim operators `Z_N, X_E, Z_S, X_W`,
    /// which are the dangling mode pairs left by the cut links.
    pub rim_logicals: usize,
    /// Whether `Z_N X_E Z_S X_W`, the loop around the hole, is a stabilizer.
    pub loop_is_stabilizer: bool,
    pub logical_pairs: Vec<(String, String)>,
}

pub fn hole_report(l: usize, white: usize) -> Result<HoleReport> {
    let base = toric_stabilizers(l, &[])?;
    let m = toric_stabilizers(l, &[white])?;
    let lat = hole_lattice(l, &[white])?;
    let rim = lat.white()[white].islands;
    let n = m.num_qubits;
    let [north, east, south, west] = rim;
    let rim_ops =
        [PauliString::z(n, north), PauliString::x(n, east), PauliString::z(n, south), PauliString::x(n, west)];
    let gens = m.unsigned_generators();
    let before = gf2_rank(&gens)?.rank;
    let mut with = gens.clone();
    with.extend(rim_ops);
    let rim_logicals = gf2_rank(&with)?.rank - before;
    let around = rim_ops.iter().fold(PauliString::identity(n), |a, p| a.mul_unchecked(p));
    Ok(HoleReport {
        size: l,
        white,
        removed: m.removed.clone(),
        baseline: degeneracy(&base)?.value(),
        degeneracy: degeneracy(&m)?.value(),
        rim,
        rim_logicals,
        loop_is_stabilizer: in_stabilizer_group(&m, &around)?,
        logical_pairs: logical_ops(&m)?.iter().map(|(a, b)| (a.word(), b.word())).collect(),
    })
}

fn pair_letter(a: Letter, b: Letter) -> char {
    use Letter::*;
    match (a.min(b), a.max(b)) {
        (A, B) | (C, D) => 'Z',
        (A, C) | (B, D) => 'X',
        _ => 'Y',
    }
}

/// Image of a product of link operators in the island qubits, up to sign:
/// each island crossed by two of the links contributes the Pauli matching
/// its mode pair (`ab`, `cd` -> Z; `ac`, `bd` -> X; `ad`, `bc` -> Y).
pub fn project_links(lat: &SignedLattice, links: &[usize]) -> Result<PauliString> {
    let n = lat.num_islands();
    let mut used: Vec<Vec<Letter>> = vec![Vec::new(); n];
    for &id in links {
        let l = lat.link(id);
        for m in [l.first, l.second] {
            used[mode_island(m)].push(mode_letter(m));
        }
    }
    let mut ops = Vec::new();
    for (i, u) in used.iter().enumerate() {
        match u.as_slice() {
            [] => {}
            [a, b] if a != b => ops.push((i, pair_letter(*a, *b))),
            _ => return Err(Error::ParityViolating(format!("island {i} is crossed by {} link ends", u.len()))),
        }
    }
    Ok(PauliString::from_sparse(n, &ops))
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FrustrationReport {
    pub size: usize,
    pub flipped_links: Vec<usize>,
    /// Positions of plaquettes whose term changed sign.
    pub flipped_plaquettes: Vec<(i32, i32)>,
    /// Ground energy with each plaquette contributing `-s a`.
    pub energy: f64,
    pub minimizing_syndromes: usize,
    pub states_per_syndrome: u128,
    pub ground_states: u128,
    /// Each minimizing syndrome as one `+`/`-` per plaquette, whites then grays.
    pub syndromes: Vec<String>,
    pub comparison: ClaimComparison,
}

/// Reference claim for a single flipped link: 10 degenerate ground states at
/// `(-L^2 + 1) Delta_eff / 2`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ClaimComparison {
    pub claimed_states: u128,
    pub claimed_energy: f64,
    /// Our energy in the same units, taking each term as `-(Delta_eff / 2) s A`.
    pub energy_in_claim_units: f64,
    pub states_agree: bool,
    pub energy_agrees: bool,
}

/// Exhaustive minimization of `-sum s a` over admissible syndromes (even
/// number of `-1` per color on the torus).
pub fn frustrated_ground_manifold(l: usize, flipped_links: &[usize]) -> Result<FrustrationReport> {
    let mut lat = build_lattice(l, Boundary::Torus)?;
    let nplaq = lat.white().len() + lat.gray().len();
    if nplaq > SYNDROME_LIMIT {
        return Err(Error::Capacity { what: "plaquettes", got: nplaq, limit: SYNDROME_LIMIT });
    }
    let mut signs = lat.signs();
    for &id in flipped_links {
        if id >= signs.len() {
            return Err(Error::Lattice(format!("link {id} out of range")));
        }
        signs[id] = -signs[id];
    }
    lat = lat.assign_link_signs(&crate::lattice::SignMode::Explicit(signs))?;
    let model = stabilizers_of(&lat)?;
    let s: Vec<i8> = model.terms.iter().map(|t| t.sign).collect();
    let nw = lat.white().len();
    let white_mask: u32 = (1 << nw) - 1;
    let admissible =
        |a: u32| (a & white_mask).count_ones().is_multiple_of(2) && (a >> nw).count_ones().is_multiple_of(2);
    let energy = |a: u32| -> i32 {
        s.iter().enumerate().map(|(i, &si)| if a >> i & 1 == 1 { si as i32 } else { -si as i32 }).sum()
    };

    let best: Vec<(i32, u32)> =
        (0u32..1 << nplaq).into_par_iter().filter(|&a| admissible(a)).map(|a| (energy(a), a)).collect();
    let emin = best.iter().map(|b| b.0).min().unwrap();
    let mut minimizers: Vec<u32> = best.iter().filter(|b| b.0 == emin).map(|b| b.1).collect();
    minimizers.sort_unstable();

    // each admissible syndrome is realized by the same number of states
    let per = 1u128 << gf2_rank(&model.unsigned_generators())?.log2_degeneracy;
    let ground_states = per * minimizers.len() as u128;
    let energy = emin as f64;
    let claimed_energy = (-((l * l) as f64) + 1.0) / 2.0;
    let energy_in_claim_units = energy / 2.0;
    Ok(FrustrationReport {
        size: l,
        flipped_links: flipped_links.to_vec(),
        flipped_plaquettes: model.terms.iter().filter(|t| t.sign < 0).map(|t| t.pos).collect(),
        energy,
        minimizing_syndromes: minimizers.len(),
        states_per_syndrome: per,
        ground_states,
        syndromes: minimizers
            .iter()
            .map(|a| (0..nplaq).map(|i| if a >> i & 1 == 1 { '-' } else { '+' }).collect())
            .collect(),
        comparison: ClaimComparison {
            claimed_states: 10,
            claimed_energy,
            energy_in_claim_units,
            states_agree: ground_states == 10,
            energy_agrees: (energy_in_claim_units - claimed_energy).abs() < 1e-12,
        },
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::eigvalsh;
    use crate::pauli::dense_matrix_of;

    fn dense_ground(m: &StabilizerModel) -> (f64, usize) {
        let v = eigvalsh(dense_matrix_of(&m.hamiltonian()).unwrap().map(|c| c.re));
        (v[0], v.iter().take_while(|&&e| (e - v[0]).abs() < 1e-9).count())
    }

    #[test]
    fn torus_degeneracy_is_four() {
        for l in 2..=6 {
            let m = toric_stabilizers(l, &[]).unwrap();
            assert_eq!(m.terms.len(), 2 * l * l);
            let d = degeneracy(&m).unwrap();
            assert_eq!((d.rank, d.value()), (2 * l * l - 2, 4), "L = {l}");
        }
        let (e, g) = dense_ground(&toric_stabilizers(2, &[]).unwrap());
        assert!((e + 8.0).abs() < 1e-9 && g == 4);
    }

    #[test]
    fn plaquettes_commute() {
        let m = toric_stabilizers(3, &[]).unwrap();
        let g = m.generators();
        for a in &g {
            for b in &g {
                assert!(a.commutes(b).unwrap());
            }
        }
    }

    #[test]
    fn projected_plaquette_links_give_the_terms() {
        let lat = build_lattice(3, Boundary::Torus).unwrap();
        let m = stabilizers_of(&lat).unwrap();
        for (p, t) in lat.plaquettes().zip(&m.terms) {
            assert_eq!(project_links(&lat, &p.links).unwrap(), t.pauli(m.num_qubits));
        }
    }

    #[test]
    fn homology_loops_project_to_logicals() {
        for l in 2..=4 {
            let lat = build_lattice(l, Boundary::Torus).unwrap();
            let m = stabilizers_of(&lat).unwrap();
            let (a, b) = lat.homology_loops().unwrap();
            let (pa, pb) = (project_links(&lat, &a.links).unwrap(), project_links(&lat, &b.links).unwrap());
            for g in m.generators() {
                assert!(g.commutes(&pa).unwrap() && g.commutes(&pb).unwrap());
            }
            assert!(!in_stabilizer_group(&m, &pa).unwrap());
            assert!(!in_stabilizer_group(&m, &pb).unwrap());
            assert!(!in_stabilizer_group(&m, &pa.mul(&pb).unwrap()).unwrap());
        }
    }

    #[test]
    fn logical_pairs_on_the_torus() {
        let m = toric_stabilizers(4, &[]).unwrap();
        let pairs = logical_ops(&m).unwrap();
        assert_eq!(pairs.len(), 2);
        let all: Vec<&PauliString> = pairs.iter().flat_map(|(a, b)| [a, b]).collect();
        for (i, a) in all.iter().enumerate() {
            for g in m.generators() {
                assert!(g.commutes(a).unwrap());
            }
            for (j, b) in all.iter().enumerate() {
                let partner = i / 2 == j / 2 && i != j;
                assert_eq!(!a.commutes(b).unwrap(), partner);
            }
            assert_eq!(a.weight(), 4, "{}", a.word());
        }
    }

    #[test]
    fn white_hole_removes_five_terms() {
        let m = toric_stabilizers(4, &[5]).unwrap();
        assert_eq!(m.removed.len(), 5);
        let d = degeneracy(&m).unwrap();
        assert_eq!(d.value(), 32);
        let pairs = logical_ops(&m).unwrap();
        assert_eq!(pairs.len(), 5);
        let r = hole_report(4, 5).unwrap();
        assert_eq!((r.baseline, r.degeneracy, r.rim_logicals), (4, 32, 3));
        assert!(r.loop_is_stabilizer);
        // two holes sharing a gray neighbour overlap
        assert!(toric_stabilizers(4, &[0, 1]).is_err());
        let m = toric_stabilizers(2, &[0]).unwrap();
        let (_, g) = dense_ground(&m);
        assert_eq!(g as u128, degeneracy(&m).unwrap().value());
    }

    #[test]
    fn removing_one_more_plaquette_doubles() {
        let mut m = toric_stabilizers(3, &[]).unwrap();
        m.terms.remove(0);
        assert_eq!(degeneracy(&m).unwrap().value(), 4);
        m.terms.remove(m.terms.len() - 1);
        assert_eq!(degeneracy(&m).unwrap().value(), 4);
        m.terms.remove(0);
        assert_eq!(degeneracy(&m).unwrap().value(), 8);
    }

    #[test]
    fn unflipped_manifold() {
        for l in 2..=3 {
            let r = frustrated_ground_manifold(l, &[]).unwrap();
            assert_eq!(r.energy, -2.0 * (l * l) as f64);
            assert_eq!((r.minimizing_syndromes, r.ground_states), (1, 4));
        }
    }

    #[test]
    fn single_flipped_link_matches_dense() {
        let r = frustrated_ground_manifold(2, &[0]).unwrap();
        assert_eq!(r.flipped_plaquettes.len(), 2);
        let mut lat = build_lattice(2, Boundary::Torus).unwrap();
        let mut s = lat.signs();
        s[0] = -s[0];
        lat = lat.assign_link_signs(&crate::lattice::SignMode::Explicit(s)).unwrap();
        let (e, g) = dense_ground(&stabilizers_of(&lat).unwrap());
        assert!((r.energy - e).abs() < 1e-9);
        assert_eq!(r.ground_states, g as u128);
        assert_eq!(r.energy, -4.0);
        assert_eq!(r.ground_states, 64);
        let r3 = frustrated_ground_manifold(3, &[0]).unwrap();
        assert_eq!((r3.energy, r3.ground_states), (-14.0, 324));
        assert!(!r3.comparison.states_agree && !r3.comparison.energy_agrees);
    }

    #[test]
    fn paired_flips_cancel() {
        let lat = build_lattice(3, Boundary::Torus).unwrap();
        // two links of one white plaquette: the white keeps its sign, the grays flip
        let w = lat.white()[0].links;
        let r = frustrated_ground_manifold(3, &[w[0], w[1]]).unwrap();
        assert_eq!(r.flipped_plaquettes.len(), 2);
        assert_eq!(r.energy, -18.0);
        assert_eq!(r.ground_states, 4);
        assert!(matches!(frustrated_ground_manifold(4, &[]), Err(Error::Capacity { .. })));
    }
}
