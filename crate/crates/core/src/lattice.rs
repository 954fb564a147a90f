//! Island lattice geometry.
//!
//! Islands and plaquettes live on a checkerboard: a site `(x, y)` with `x + y`
//! odd is an island, `x + y` even is a plaquette, white when both coordinates
//! are even and gray when both are odd. Plaquette `mu` touches the islands
//! `N = mu + (0,1)`, `E = mu + (1,0)`, `S = mu - (0,1)` and `W = mu - (1,0)`.
//!
//! Each island carries four Majorana modes, one per diagonal direction:
//! `a` up-left, `b` up-right, `c` down-left, `d` down-right. Every diagonal
//! link belongs to exactly one white plaquette, and is oriented as in the
//! white plaquette's anticlockwise convention:
//!
//! | slot | modes             |
//! |------|-------------------|
//! | TL   | `i c_b^W c_c^N`   |
//! | BL   | `i c_a^S c_d^W`   |
//! | BR   | `i c_c^E c_b^S`   |
//! | TR   | `i c_d^N c_a^E`   |
//!
//! Canonical link order on the torus is row-major over white plaquettes, then
//! TL, BL, BR, TR.

use std::collections::{BTreeSet, HashMap};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Boundary {
    Torus,
    Open,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Letter {
    A,
    B,
    C,
    D,
}

impl Letter {
    pub const ALL: [Letter; 4] = [Letter::A, Letter::B, Letter::C, Letter::D];

    pub fn index(self) -> usize {
        self as usize
    }

    /// Diagonal direction `(dx, dy)` the mode points to.
    pub fn direction(self) -> (i32, i32) {
        match self {
            Letter::A => (-1, 1),
            Letter::B => (1, 1),
            Letter::C => (-1, -1),
            Letter::D => (1, -1),
        }
    }

    pub fn from_char(c: char) -> Option<Letter> {
        match c.to_ascii_lowercase() {
            'a' => Some(Letter::A),
            'b' => Some(Letter::B),
            'c' => Some(Letter::C),
            'd' => Some(Letter::D),
            _ => None,
        }
    }
}

/// Majorana mode id: `4 * island + letter`.
pub type ModeId = usize;

pub fn mode_id(island: usize, letter: Letter) -> ModeId {
    4 * island + letter.index()
}

pub fn mode_island(m: ModeId) -> usize {
    m / 4
}

pub fn mode_letter(m: ModeId) -> Letter {
    Letter::ALL[m % 4]
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Color {
    White,
    Gray,
}

/// Position of a link on its white plaquette.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Slot {
    TopLeft,
    BottomLeft,
    BottomRight,
    TopRight,
}

impl Slot {
    pub const ALL: [Slot; 4] = [Slot::TopLeft, Slot::BottomLeft, Slot::BottomRight, Slot::TopRight];
}

/// Oriented link `sign * i c_first c_second`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Link {
    pub first: ModeId,
    pub second: ModeId,
    pub sign: i8,
    /// White plaquette and slot for diagonal links; `None` for open-boundary links.
    pub white: Option<(usize, Slot)>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Plaquette {
    pub pos: (i32, i32),
    pub color: Color,
    /// Islands in the order N, E, S, W.
    pub islands: [usize; 4],
    /// Link ids in the order TL, BL, BR, TR.
    pub links: [usize; 4],
    /// `+1` when each link's stored orientation matches this plaquette's own
    /// anticlockwise orientation, `-1` per mismatch (product over the four).
    pub orientation: i8,
}

impl Plaquette {
    pub fn north(&self) -> usize {
        self.islands[0]
    }
    pub fn east(&self) -> usize {
        self.islands[1]
    }
    pub fn south(&self) -> usize {
        self.islands[2]
    }
    pub fn west(&self) -> usize {
        self.islands[3]
    }

    /// The eight modes of the plaquette operator, in the product order
    /// `c_d^N c_a^E c_c^E c_b^S c_a^S c_d^W c_b^W c_c^N`.
    pub fn operator_modes(&self) -> [ModeId; 8] {
        let [n, e, s, w] = self.islands;
        [
            mode_id(n, Letter::D),
            mode_id(e, Letter::A),
            mode_id(e, Letter::C),
            mode_id(s, Letter::B),
            mode_id(s, Letter::A),
            mode_id(w, Letter::D),
            mode_id(w, Letter::B),
            mode_id(n, Letter::C),
        ]
    }
}

/// Non-contractible cycle of links on the torus.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LoopPath {
    pub links: Vec<usize>,
    pub islands: Vec<usize>,
    /// Net winding `(wx, wy)` in units of the torus period.
    pub winding: (i32, i32),
}

/// Boundary link pattern for open patches.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum BoundaryLinks {
    /// No boundary links.
    None,
    /// Pair dangling boundary modes so that exactly one mode per corner stays unlinked.
    Corners,
    /// Explicit extra links as mode pairs.
    Explicit(Vec<(ModeId, ModeId)>),
}

#[derive(Clone, Debug, PartialEq)]
pub struct SignedLattice {
    size: usize,
    boundary: Boundary,
    /// Period of the coordinate torus (`2L`), zero for open patches.
    period: i32,
    islands: Vec<(i32, i32)>,
    island_at: HashMap<(i32, i32), usize>,
    links: Vec<Link>,
    white: Vec<Plaquette>,
    gray: Vec<Plaquette>,
    holes: BTreeSet<usize>,
}

/// Sign assignment mode.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum SignMode {
    Default,
    Random(u64),
    Explicit(Vec<i8>),
}

impl SignedLattice {
    pub fn size(&self) -> usize {
        self.size
    }
    pub fn boundary(&self) -> Boundary {
        self.boundary
    }
    pub fn num_islands(&self) -> usize {
        self.islands.len()
    }
    pub fn num_modes(&self) -> usize {
        4 * self.islands.len()
    }
    pub fn island_pos(&self, i: usize) -> (i32, i32) {
        self.islands[i]
    }
    pub fn island_at(&self, pos: (i32, i32)) -> Option<usize> {
        self.island_at.get(&self.wrap(pos)).copied()
    }
    /// All geometric links, including removed ones.
    pub fn links(&self) -> &[Link] {
        &self.links
    }
    pub fn link(&self, id: usize) -> &Link {
        &self.links[id]
    }
    pub fn white(&self) -> &[Plaquette] {
        &self.white
    }
    pub fn gray(&self) -> &[Plaquette] {
        &self.gray
    }
    pub fn plaquettes(&self) -> impl Iterator<Item = &Plaquette> {
        self.white.iter().chain(self.gray.iter())
    }
    pub fn holes(&self) -> &BTreeSet<usize> {
        &self.holes
    }
    pub fn is_active(&self, link: usize) -> bool {
        !self.holes.contains(&link)
    }
    pub fn active_links(&self) -> impl Iterator<Item = (usize, &Link)> {
        self.links.iter().enumerate().filter(move |(i, _)| !self.holes.contains(i))
    }
    pub fn signs(&self) -> Vec<i8> {
        self.links.iter().map(|l| l.sign).collect()
    }

    fn wrap(&self, (x, y): (i32, i32)) -> (i32, i32) {
        if self.period > 0 {
            (x.rem_euclid(self.period), y.rem_euclid(self.period))
        } else {
            (x, y)
        }
    }

    /// Link joining a mode to another mode, if any active link uses it.
    pub fn link_of_mode(&self, m: ModeId) -> Option<usize> {
        self.active_links().find(|(_, l)| l.first == m || l.second == m).map(|(i, _)| i)
    }

    /// Modes not touched by any active link.
    pub fn unlinked_modes(&self) -> Vec<ModeId> {
        let mut used = vec![false; self.num_modes()];
        for (_, l) in self.active_links() {
            used[l.first] = true;
            used[l.second] = true;
        }
        (0..self.num_modes()).filter(|&m| !used[m]).collect()
    }

    /// Link between two diagonally adjacent islands.
    pub fn link_between(&self, i: usize, j: usize) -> Option<usize> {
        self.links.iter().position(|l| {
            let (a, b) = (mode_island(l.first), mode_island(l.second));
            l.white.is_some() && ((a == i && b == j) || (a == j && b == i))
        })
    }

    /// Removes links (a hole); ids refer to the canonical link order.
    pub fn with_holes(mut self, holes: impl IntoIterator<Item = usize>) -> Result<Self> {
        for h in holes {
            if h >= self.links.len() {
                return Err(Error::Lattice(format!("hole link {h} out of range")));
            }
            self.holes.insert(h);
        }
        Ok(self)
    }

    /// The four links of a white plaquette, i.e. a white hole centred on it.
    pub fn white_hole_links(&self, white: usize) -> [usize; 4] {
        self.white[white].links
    }

    pub fn assign_link_signs(mut self, mode: &SignMode) -> Result<Self> {
        match mode {
            SignMode::Default => self.links.iter_mut().for_each(|l| l.sign = 1),
            SignMode::Random(seed) => {
                let mut rng = ChaCha8Rng::seed_from_u64(*seed);
                for l in self.links.iter_mut() {
                    l.sign = if rng.random::<bool>() { 1 } else { -1 };
                }
            }
            SignMode::Explicit(v) => {
                if v.len() != self.links.len() {
                    return Err(Error::Lattice(format!("expected {} link signs, got {}", self.links.len(), v.len())));
                }
                if let Some(bad) = v.iter().find(|&&s| s != 1 && s != -1) {
                    return Err(Error::Lattice(format!("link sign {bad} is not +-1")));
                }
                for (l, &s) in self.links.iter_mut().zip(v) {
                    l.sign = s;
                }
            }
        }
        Ok(self)
    }

    /// Product of the link signs around a plaquette, including the orientation factor,
    /// i.e. the sign relating the plaquette operator to the product of Hamiltonian links.
    pub fn plaquette_sign(&self, p: &Plaquette) -> i8 {
        p.links.iter().map(|&l| self.links[l].sign).product::<i8>() * p.orientation
    }

    /// Two minimal non-contractible loops, classes `(1,0)` and `(0,1)`.
    pub fn homology_loops(&self) -> Result<(LoopPath, LoopPath)> {
        if self.boundary != Boundary::Torus {
            return Err(Error::NoLoops);
        }
        let p = self.period;
        let horiz = (0..p)
            .step_by(2)
            .map(|y0| self.zigzag((1, y0), [(1, 1), (1, -1)]))
            .find(|lp| lp.links.iter().all(|l| self.is_active(*l)));
        let vert = (0..p)
            .step_by(2)
            .map(|x0| self.zigzag((x0, 1), [(1, 1), (-1, 1)]))
            .find(|lp| lp.links.iter().all(|l| self.is_active(*l)));
        match (horiz, vert) {
            (Some(h), Some(v)) => Ok((h, v)),
            _ => Err(Error::Lattice("every straight loop crosses a hole".into())),
        }
    }

    fn zigzag(&self, start: (i32, i32), steps: [(i32, i32); 2]) -> LoopPath {
        let mut pos = start;
        let mut unwrapped = start;
        let mut islands = vec![self.island_at(pos).expect("start island")];
        let mut links = Vec::new();
        for k in 0..self.period {
            let (dx, dy) = steps[(k % 2) as usize];
            let next = (pos.0 + dx, pos.1 + dy);
            unwrapped = (unwrapped.0 + dx, unwrapped.1 + dy);
            let a = *islands.last().unwrap();
            let b = self.island_at(next).expect("neighbour island");
            links.push(self.link_between(a, b).expect("diagonal link"));
            islands.push(b);
            pos = self.wrap(next);
        }
        islands.pop();
        let winding = ((unwrapped.0 - start.0) / self.period, (unwrapped.1 - start.1) / self.period);
        LoopPath { links, islands, winding }
    }

    pub fn describe(&self) -> LatticeDescription {
        LatticeDescription {
            l: self.size,
            boundary: self.boundary,
            signs: self.signs(),
            holes: self.holes.iter().copied().collect(),
        }
    }

    pub fn from_description(d: &LatticeDescription) -> Result<Self> {
        build_lattice(d.l, d.boundary)?
            .assign_link_signs(&SignMode::Explicit(d.signs.clone()))?
            .with_holes(d.holes.iter().copied())
    }
}

/// Serializable lattice description.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LatticeDescription {
    #[serde(rename = "L")]
    pub l: usize,
    pub boundary: Boundary,
    pub signs: Vec<i8>,
    pub holes: Vec<usize>,
}

fn diag_links_for(white_pos: (i32, i32), at: &dyn Fn((i32, i32)) -> Option<usize>) -> [Option<(ModeId, ModeId)>; 4] {
    let (x, y) = white_pos;
    let n = at((x, y + 1));
    let e = at((x + 1, y));
    let s = at((x, y - 1));
    let w = at((x - 1, y));
    let pair = |p: Option<usize>, lp: Letter, q: Option<usize>, lq: Letter| Some((mode_id(p?, lp), mode_id(q?, lq)));
    [
        pair(w, Letter::B, n, Letter::C),
        pair(s, Letter::A, w, Letter::D),
        pair(e, Letter::C, s, Letter::B),
        pair(n, Letter::D, e, Letter::A),
    ]
}

fn finish(
    size: usize,
    boundary: Boundary,
    period: i32,
    islands: Vec<(i32, i32)>,
    extra: &[(ModeId, ModeId)],
) -> Result<SignedLattice> {
    let island_at: HashMap<(i32, i32), usize> = islands.iter().enumerate().map(|(i, &p)| (p, i)).collect();
    let wrap = |(x, y): (i32, i32)| {
        if period > 0 {
            (x.rem_euclid(period), y.rem_euclid(period))
        } else {
            (x, y)
        }
    };
    let at = |p: (i32, i32)| island_at.get(&wrap(p)).copied();

    // candidate plaquette centres
    let mut centres: BTreeSet<(i32, i32)> = BTreeSet::new();
    for &(x, y) in &islands {
        for (dx, dy) in [(1, 0), (-1, 0), (0, 1), (0, -1)] {
            centres.insert(wrap((x + dx, y + dy)));
        }
    }
    // row-major: by y, then x
    let mut centres: Vec<(i32, i32)> = centres.into_iter().collect();
    centres.sort_by_key(|&(x, y)| (y, x));

    let mut links: Vec<Link> = Vec::new();
    let mut white_idx = 0usize;
    let mut white_slots: Vec<((i32, i32), [Option<usize>; 4])> = Vec::new();
    for &c in centres.iter().filter(|c| c.0.rem_euclid(2) == 0 && c.1.rem_euclid(2) == 0) {
        let pairs = diag_links_for(c, &at);
        let mut ids = [None; 4];
        for (k, p) in pairs.iter().enumerate() {
            if let Some((f, s)) = p {
                ids[k] = Some(links.len());
                links.push(Link { first: *f, second: *s, sign: 1, white: Some((white_idx, Slot::ALL[k])) });
            }
        }
        if ids.iter().any(|i| i.is_some()) {
            white_slots.push((c, ids));
            white_idx += 1;
        }
    }
    let mut used: HashMap<ModeId, usize> = HashMap::new();
    for (i, l) in links.iter().enumerate() {
        for m in [l.first, l.second] {
            if used.insert(m, i).is_some() {
                return Err(Error::Lattice(format!("mode {m} on two links")));
            }
        }
    }
    for &(f, s) in extra {
        for m in [f, s] {
            if m >= 4 * islands.len() {
                return Err(Error::Lattice(format!("boundary link mode {m} out of range")));
            }
            if used.insert(m, links.len()).is_some() {
                return Err(Error::Lattice(format!("mode {m} on two links")));
            }
        }
        if mode_island(f) == mode_island(s) {
            return Err(Error::Lattice("boundary link within one island".into()));
        }
        links.push(Link { first: f, second: s, sign: 1, white: None });
    }

    let find = |a: ModeId, b: ModeId| -> Option<(usize, i8)> {
        links
            .iter()
            .position(|l| (l.first == a && l.second == b) || (l.first == b && l.second == a))
            .map(|i| (i, if links[i].first == a { 1 } else { -1 }))
    };

    let mut white = Vec::new();
    let mut gray = Vec::new();
    for &c in &centres {
        let (x, y) = c;
        let nesw = [at((x, y + 1)), at((x + 1, y)), at((x, y - 1)), at((x - 1, y))];
        if nesw.iter().any(|i| i.is_none()) {
            continue;
        }
        let isl = nesw.map(|i| i.unwrap());
        let pairs = diag_links_for(c, &at).map(|p| p.unwrap());
        let mut ids = [0usize; 4];
        let mut orientation = 1i8;
        let mut complete = true;
        for (k, (a, b)) in pairs.iter().enumerate() {
            match find(*a, *b) {
                Some((i, o)) => {
                    ids[k] = i;
                    orientation *= o;
                }
                None => complete = false,
            }
        }
        if !complete {
            continue;
        }
        let color = if x.rem_euclid(2) == 0 { Color::White } else { Color::Gray };
        let p = Plaquette { pos: c, color, islands: isl, links: ids, orientation };
        match color {
            Color::White => white.push(p),
            Color::Gray => gray.push(p),
        }
    }

    Ok(SignedLattice { size, boundary, period, islands, island_at, links, white, gray, holes: BTreeSet::new() })
}

/// Torus of `2L^2` islands, or an `L x L` open island patch with corner boundary links.
pub fn build_lattice(l: usize, boundary: Boundary) -> Result<SignedLattice> {
    match boundary {
        Boundary::Torus => {
            if l < 2 {
                return Err(Error::Lattice(format!("torus needs L >= 2, got {l}")));
            }
            let p = 2 * l as i32;
            let mut islands = Vec::new();
            for y in 0..p {
                for x in 0..p {
                    if (x + y) % 2 == 1 {
                        islands.push((x, y));
                    }
                }
            }
            finish(l, boundary, p, islands, &[])
        }
        Boundary::Open => {
            if l < 1 {
                return Err(Error::Lattice("open patch needs L >= 1".into()));
            }
            build_open_patch(l, l, BoundaryLinks::Corners)
        }
    }
}

/// Open patch of `rows x cols` islands on the rotated grid; island `(u, v)` sits
/// at `(u + v + 1, v - u + M)`. Neighbour `u + 1` is down-right, `v + 1` up-right.
pub fn build_open_patch(rows: usize, cols: usize, boundary_links: BoundaryLinks) -> Result<SignedLattice> {
    if rows == 0 || cols == 0 {
        return Err(Error::Lattice("empty patch".into()));
    }
    let m = 2 * ((rows as i32 - 1 + 1) / 2);
    let pos = |u: usize, v: usize| (u as i32 + v as i32 + 1, v as i32 - u as i32 + m);
    let mut coords: Vec<((i32, i32), (usize, usize))> = Vec::new();
    for u in 0..rows {
        for v in 0..cols {
            coords.push((pos(u, v), (u, v)));
        }
    }
    coords.sort_by_key(|&((x, y), _)| (y, x));
    let islands: Vec<(i32, i32)> = coords.iter().map(|c| c.0).collect();
    let grid: HashMap<(usize, usize), usize> = coords.iter().enumerate().map(|(i, &(_, uv))| (uv, i)).collect();
    let g = |u: usize, v: usize| grid[&(u, v)];

    let extra = match boundary_links {
        BoundaryLinks::None => Vec::new(),
        BoundaryLinks::Explicit(v) => v,
        BoundaryLinks::Corners => {
            if rows % 2 != cols % 2 {
                return Err(Error::Lattice("corner boundary links need rows and cols of equal parity".into()));
            }
            corner_pairing(rows, cols, &g)
        }
    };
    finish(rows.max(cols), Boundary::Open, 0, islands, &extra)
}

/// The four-island cluster around a single white plaquette, without boundary links.
pub fn single_plaquette_cluster() -> Result<SignedLattice> {
    build_open_patch(2, 2, BoundaryLinks::None)
}

fn pair_run(out: &mut Vec<(ModeId, ModeId)>, run: &[ModeId]) {
    for w in run.chunks(2) {
        if let [a, b] = w {
            out.push((*a, *b));
        }
    }
}

fn corner_pairing(rows: usize, cols: usize, g: &dyn Fn(usize, usize) -> usize) -> Vec<(ModeId, ModeId)> {
    // dangling directions: u-1 -> a, v+1 -> b, v-1 -> c, u+1 -> d
    let top: Vec<ModeId> = (0..cols).map(|v| mode_id(g(0, v), Letter::A)).collect();
    let bottom: Vec<ModeId> = (0..cols).map(|v| mode_id(g(rows - 1, v), Letter::D)).collect();
    let left: Vec<ModeId> = (0..rows).map(|u| mode_id(g(u, 0), Letter::C)).collect();
    let right: Vec<ModeId> = (0..rows).map(|u| mode_id(g(u, cols - 1), Letter::B)).collect();
    let mut out = Vec::new();
    if rows.is_multiple_of(2) && cols.is_multiple_of(2) {
        pair_run(&mut out, &top);
        pair_run(&mut out, &bottom);
        pair_run(&mut out, &left[1..rows - 1]);
        pair_run(&mut out, &right[1..rows - 1]);
    } else if rows % 2 == 1 && cols % 2 == 1 {
        // each edge leaves its last mode, going around the patch
        pair_run(&mut out, &top[..cols - 1]);
        pair_run(&mut out, &right[..rows - 1]);
        let b: Vec<ModeId> = bottom.iter().rev().copied().collect();
        pair_run(&mut out, &b[..cols - 1]);
        let l: Vec<ModeId> = left.iter().rev().copied().collect();
        pair_run(&mut out, &l[..rows - 1]);
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn torus_counts() {
        for l in 2..=4 {
            let lat = build_lattice(l, Boundary::Torus).unwrap();
            assert_eq!(lat.num_islands(), 2 * l * l);
            assert_eq!(lat.num_modes(), 8 * l * l);
            assert_eq!(lat.links().len(), 4 * l * l);
            assert_eq!(lat.white().len(), l * l);
            assert_eq!(lat.gray().len(), l * l);
            assert!(lat.unlinked_modes().is_empty());
        }
    }

    #[test]
    fn rejects_small_sizes() {
        assert!(build_lattice(1, Boundary::Torus).is_err());
        assert!(build_lattice(0, Boundary::Open).is_err());
    }

    #[test]
    fn single_plaquette() {
        let lat = single_plaquette_cluster().unwrap();
        assert_eq!(lat.num_islands(), 4);
        assert_eq!(lat.num_modes(), 16);
        assert_eq!(lat.links().len(), 4);
        assert_eq!(lat.white().len(), 1);
        assert_eq!(lat.gray().len(), 0);
        assert_eq!(lat.unlinked_modes().len(), 8);
    }

    #[test]
    fn open_patches_leave_four_corner_modes() {
        for l in 1..=5 {
            let lat = build_lattice(l, Boundary::Open).unwrap();
            assert_eq!(lat.unlinked_modes().len(), 4, "L = {l}");
        }
        let lat = build_lattice(2, Boundary::Open).unwrap();
        let isl: BTreeSet<usize> = lat.unlinked_modes().iter().map(|&m| mode_island(m)).collect();
        assert_eq!(isl.len(), 4);
    }

    #[test]
    fn top_left_link_of_white_plaquette() {
        let lat = build_lattice(2, Boundary::Torus).unwrap();
        let w = &lat.white()[0];
        let tl = lat.link(w.links[0]);
        assert_eq!(tl.first, mode_id(w.west(), Letter::B));
        assert_eq!(tl.second, mode_id(w.north(), Letter::C));
        assert_eq!(tl.sign, 1);
        assert_eq!(w.orientation, 1);
    }

    #[test]
    fn each_link_borders_one_white_and_one_gray() {
        let lat = build_lattice(3, Boundary::Torus).unwrap();
        let mut count = vec![(0, 0); lat.links().len()];
        for p in lat.plaquettes() {
            for &l in &p.links {
                match p.color {
                    Color::White => count[l].0 += 1,
                    Color::Gray => count[l].1 += 1,
                }
            }
        }
        assert!(count.iter().all(|&c| c == (1, 1)));
    }

    #[test]
    fn gray_plaquettes_have_reversed_orientation() {
        let lat = build_lattice(2, Boundary::Torus).unwrap();
        for g in lat.gray() {
            assert_eq!(g.orientation, 1, "four reversed links multiply to +1");
        }
    }

    #[test]
    fn random_signs_are_deterministic() {
        let a = build_lattice(3, Boundary::Torus).unwrap().assign_link_signs(&SignMode::Random(7)).unwrap();
        let b = build_lattice(3, Boundary::Torus).unwrap().assign_link_signs(&SignMode::Random(7)).unwrap();
        assert_eq!(a.signs(), b.signs());
        assert!(a.signs().contains(&-1));
    }

    #[test]
    fn all_negative_signs_keep_plaquette_products() {
        let lat = build_lattice(2, Boundary::Torus).unwrap();
        let neg = lat.clone().assign_link_signs(&SignMode::Explicit(vec![-1; 16])).unwrap();
        for (p, q) in lat.plaquettes().zip(neg.plaquettes()) {
            assert_eq!(lat.plaquette_sign(p), neg.plaquette_sign(q));
        }
        assert!(lat.assign_link_signs(&SignMode::Explicit(vec![1; 3])).is_err());
    }

    #[test]
    fn loops_wind_once() {
        let lat = build_lattice(2, Boundary::Torus).unwrap();
        let (a, b) = lat.homology_loops().unwrap();
        assert_eq!(a.winding, (1, 0));
        assert_eq!(b.winding, (0, 1));
        assert_eq!(a.links.len(), 4);
        assert!(build_lattice(2, Boundary::Open).unwrap().homology_loops().is_err());
    }

    #[test]
    fn loops_avoid_holes() {
        let lat = build_lattice(4, Boundary::Torus).unwrap();
        let (a, _) = lat.homology_loops().unwrap();
        let holed = lat.clone().with_holes([a.links[0]]).unwrap();
        let (h, v) = holed.homology_loops().unwrap();
        assert!(h.links.iter().chain(v.links.iter()).all(|l| holed.is_active(*l)));
        assert_eq!(h.winding, (1, 0));
    }

    #[test]
    fn description_round_trip() {
        let lat = build_lattice(2, Boundary::Torus)
            .unwrap()
            .assign_link_signs(&SignMode::Random(3))
            .unwrap()
            .with_holes([1, 5])
            .unwrap();
        let json = serde_json::to_string(&lat.describe()).unwrap();
        let d: LatticeDescription = serde_json::from_str(&json).unwrap();
        assert_eq!(SignedLattice::from_description(&d).unwrap(), lat);
        assert!(serde_json::from_str::<LatticeDescription>(
            r#"{"L":2,"boundary":"torus","signs":[],"holes":[],"extra":1}"#
        )
        .is_err());
    }
}
