//! Jordan-Wigner encoding of the island Majorana modes and the model Hamiltonian.
//!
//! Modes are grouped eight per white plaquette. Within a plaquette the octet
//! positions are
//!
//! | position | 1 | 2 | 3 | 4 | 5 | 6 | 7 | 8 |
//! |----------|---|---|---|---|---|---|---|---|
//! | mode     | `d^N` | `c^N` | `b^W` | `d^W` | `a^S` | `b^S` | `c^E` | `a^E` |
//!
//! so the plaquette's four qubits are, in order, the N, W, S and E islands.
//! Position `2i - 1` maps to `Z...Z X_i` and `2i` to `Z...Z Y_i`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::lattice::{mode_id, mode_island, Boundary, Letter, ModeId, SignedLattice};
use crate::pauli::{OperatorSum, PauliString};

/// Octet table: `(island slot, letter)` for positions 1..8; slots are N, E, S, W.
pub const OCTET: [(usize, Letter); 8] = [
    (0, Letter::D),
    (0, Letter::C),
    (3, Letter::B),
    (3, Letter::D),
    (2, Letter::A),
    (2, Letter::B),
    (1, Letter::C),
    (1, Letter::A),
];

/// Bijection between Majorana modes and Jordan-Wigner positions (0-based).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ModeOrder {
    position: Vec<usize>,
    mode_at: Vec<ModeId>,
}

impl ModeOrder {
    pub fn num_modes(&self) -> usize {
        self.mode_at.len()
    }
    pub fn num_qubits(&self) -> usize {
        self.mode_at.len() / 2
    }
    /// 0-based position of a mode.
    pub fn position(&self, m: ModeId) -> usize {
        self.position[m]
    }
    pub fn mode_at(&self, pos: usize) -> ModeId {
        self.mode_at[pos]
    }
    /// Qubit carrying a mode.
    pub fn qubit_of(&self, m: ModeId) -> usize {
        self.position[m] / 2
    }
}

/// Row-major white plaquette order.
pub fn jw_order(lat: &SignedLattice) -> Result<ModeOrder> {
    let visit: Vec<usize> = (0..lat.white().len()).collect();
    jw_order_with(lat, &visit)
}

/// Jordan-Wigner order visiting white plaquettes in the given order.
pub fn jw_order_with(lat: &SignedLattice, visit: &[usize]) -> Result<ModeOrder> {
    let nm = lat.num_modes();
    let mut seen = vec![false; lat.white().len()];
    let mut mode_at = Vec::with_capacity(nm);
    for &w in visit {
        if w >= seen.len() || seen[w] {
            return Err(Error::Lattice(format!("white plaquette {w} repeated or out of range")));
        }
        seen[w] = true;
        let p = &lat.white()[w];
        for &(slot, letter) in &OCTET {
            mode_at.push(mode_id(p.islands[slot], letter));
        }
    }
    if seen.iter().any(|s| !s) {
        return Err(Error::Lattice("visit order misses a white plaquette".into()));
    }
    let mut taken = vec![false; nm];
    for &m in &mode_at {
        if taken[m] {
            return Err(Error::Lattice(format!("mode {m} lies in two white octets")));
        }
        taken[m] = true;
    }
    if lat.boundary() == Boundary::Torus && mode_at.len() != nm {
        return Err(Error::Lattice("white octets do not cover the torus".into()));
    }
    mode_at.extend((0..nm).filter(|&m| !taken[m]));
    let mut position = vec![0; nm];
    for (p, &m) in mode_at.iter().enumerate() {
        position[m] = p;
    }
    Ok(ModeOrder { position, mode_at })
}

/// Jordan-Wigner image of the Majorana at 1-based position `k`.
pub fn majorana_pauli(k: usize, order: &ModeOrder) -> Result<PauliString> {
    if k == 0 || k > order.num_modes() {
        return Err(Error::ModeOutOfRange(k, order.num_modes()));
    }
    Ok(majorana_at(k - 1, order.num_qubits()))
}

fn majorana_at(pos: usize, n: usize) -> PauliString {
    let q = pos / 2;
    let z = (1u128 << q) - 1;
    if pos.is_multiple_of(2) {
        PauliString::from_masks(n, 1 << q, z, 0)
    } else {
        PauliString::from_masks(n, 1 << q, z | 1 << q, 0)
    }
}

/// Image of a mode.
pub fn mode_pauli(m: ModeId, order: &ModeOrder) -> PauliString {
    majorana_at(order.position(m), order.num_qubits())
}

/// Ordered product of mode images.
pub fn mode_product(modes: &[ModeId], order: &ModeOrder) -> PauliString {
    modes.iter().fold(PauliString::identity(order.num_qubits()), |acc, &m| acc.mul_unchecked(&mode_pauli(m, order)))
}

/// `i c_p c_q`.
pub fn bilinear(p: ModeId, q: ModeId, order: &ModeOrder) -> PauliString {
    mode_product(&[p, q], order).times_i()
}

/// Quadratic on-island perturbation `strength * i c_p c_q`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EpsilonTerm {
    pub island: usize,
    pub letters: (char, char),
    pub strength: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ModelParams {
    pub delta: f64,
    pub lambda: f64,
    #[serde(default)]
    pub epsilon: Vec<EpsilonTerm>,
}

impl ModelParams {
    pub fn new(delta: f64, lambda: f64) -> Self {
        Self { delta, lambda, epsilon: Vec::new() }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.lambda >= 0.0) || !self.delta.is_finite() || !self.lambda.is_finite() {
            return Err(Error::Config(format!(
                "need finite delta and lambda >= 0, got {} and {}",
                self.delta, self.lambda
            )));
        }
        for e in &self.epsilon {
            let a = Letter::from_char(e.letters.0);
            let b = Letter::from_char(e.letters.1);
            if a.is_none() || b.is_none() || a == b {
                return Err(Error::Config(format!("epsilon letters {:?} must be two distinct of a-d", e.letters)));
            }
        }
        Ok(())
    }
}

/// Island term `-Delta c_a c_b c_c c_d`.
pub fn island_term(island: usize, order: &ModeOrder) -> PauliString {
    mode_product(&Letter::ALL.map(|l| mode_id(island, l)), order)
}

/// Hamiltonian link string `s * i c_first c_second`.
pub fn link_term(lat: &SignedLattice, link: usize, order: &ModeOrder) -> PauliString {
    let l = lat.link(link);
    let v = bilinear(l.first, l.second, order);
    if l.sign < 0 {
        v.negate()
    } else {
        v
    }
}

/// `H = -Delta sum c_a c_b c_c c_d + lambda sum s i c_x c_y + eps terms`.
pub fn build_h(lat: &SignedLattice, p: &ModelParams, order: &ModeOrder) -> Result<OperatorSum> {
    p.validate()?;
    let n = order.num_qubits();
    let mut h = OperatorSum::zero(n);
    if p.delta != 0.0 {
        for i in 0..lat.num_islands() {
            h.add_real(-p.delta, &island_term(i, order));
        }
    }
    if p.lambda != 0.0 {
        for (id, _) in lat.active_links() {
            h.add_real(p.lambda, &link_term(lat, id, order));
        }
    }
    for e in &p.epsilon {
        if e.island >= lat.num_islands() {
            return Err(Error::Config(format!("epsilon island {} out of range", e.island)));
        }
        let a = mode_id(e.island, Letter::from_char(e.letters.0).unwrap());
        let b = mode_id(e.island, Letter::from_char(e.letters.1).unwrap());
        h.add_real(e.strength, &bilinear(a, b, order));
    }
    Ok(h)
}

/// Conserved operators: plaquettes and, on the torus, the two loop operators.
#[derive(Clone, Debug, PartialEq)]
pub struct ConservedSet {
    pub white: Vec<PauliString>,
    pub gray: Vec<PauliString>,
    pub loops: Option<(PauliString, PauliString)>,
}

impl ConservedSet {
    pub fn all(&self) -> Vec<PauliString> {
        let mut v: Vec<PauliString> = self.white.iter().chain(self.gray.iter()).copied().collect();
        if let Some((a, b)) = self.loops {
            v.push(a);
            v.push(b);
        }
        v
    }
}

/// Product of unsigned link operators `i c_first c_second` along a list of links.
pub fn link_product(lat: &SignedLattice, links: &[usize], order: &ModeOrder) -> PauliString {
    links.iter().fold(PauliString::identity(order.num_qubits()), |acc, &id| {
        let l = lat.link(id);
        acc.mul_unchecked(&bilinear(l.first, l.second, order))
    })
}

pub fn conserved_set(lat: &SignedLattice, order: &ModeOrder) -> Result<ConservedSet> {
    let plaq = |p: &crate::lattice::Plaquette| mode_product(&p.operator_modes(), order);
    let white = lat.white().iter().map(plaq).collect();
    let gray = lat.gray().iter().map(plaq).collect();
    let loops = if lat.boundary() == Boundary::Torus {
        let (a, b) = lat.homology_loops()?;
        Some((link_product(lat, &a.links, order), link_product(lat, &b.links, order)))
    } else {
        None
    };
    Ok(ConservedSet { white, gray, loops })
}

/// The two qubits carrying an island's modes, ascending.
pub fn island_qubits(island: usize, order: &ModeOrder) -> (usize, usize) {
    let qs = Letter::ALL.map(|l| order.qubit_of(mode_id(island, l)));
    (*qs.iter().min().unwrap(), *qs.iter().max().unwrap())
}

/// Which island a JW qubit belongs to.
pub fn qubit_island(q: usize, order: &ModeOrder) -> usize {
    mode_island(order.mode_at(2 * q))
}
