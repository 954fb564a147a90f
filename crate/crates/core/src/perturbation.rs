//! Low-order self-energy expansion around the island-parity ground space.
//!
//! `H0 = -Delta sum_i c_a c_b c_c c_d` is diagonal after the Jordan-Wigner map,
//! shifted so its ground energy is zero. The resolvent on the excited space is
//! `G = P+ (E0 - H0)^-1 P+` with `E0 = 0`, and the order-`k` term is
//! `P- V (G V)^(k-1) P-`. Effective operators are expressed on island qubits
//! with `Z_i = i c_c c_d` and `X_i = i c_c c_a`.

use std::collections::HashMap;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fermion::{bilinear, island_term, jw_order, link_term, ModeOrder};
use crate::lattice::{mode_id, Letter, SignedLattice};
use crate::pauli::{OperatorSum, PauliString, C64};
use crate::sector::{sector_basis_from, SectorLabel};

type State = HashMap<u64, C64>;

fn zero() -> C64 {
    C64::new(0.0, 0.0)
}

fn apply_op(op: &OperatorSum, v: &State) -> State {
    let mut out = State::new();
    for (&s, &a) in v {
        for (c, p) in op.iter() {
            let (t, ph) = p.apply_basis(s);
            *out.entry(t).or_insert(zero()) += a * c * ph;
        }
    }
    out.retain(|_, c| c.norm() > 1e-15);
    out
}

fn apply_pauli(p: &PauliString, v: &State) -> State {
    v.iter()
        .map(|(&s, &a)| {
            let (t, ph) = p.apply_basis(s);
            (t, a * ph)
        })
        .collect()
}

fn inner(a: &State, b: &State) -> C64 {
    a.iter().map(|(s, x)| b.get(s).map_or(zero(), |y| x.conj() * y)).sum()
}

/// Logical island-qubit frame inside the ground space of `H0`.
pub struct IslandFrame {
    pub order: ModeOrder,
    /// `|s>` for every island bit string `s`, island `j` is bit `j`.
    pub states: Vec<State>,
    /// Excitation energy of each JW basis state above the `H0` ground space, per unit `Delta`.
    parity_terms: Vec<PauliString>,
}

impl IslandFrame {
    pub fn new(lat: &SignedLattice) -> Result<Self> {
        let order = jw_order(lat)?;
        let n = order.num_qubits();
        let m = lat.num_islands();
        if m > 10 {
            return Err(Error::Capacity { what: "islands", got: m, limit: 10 });
        }
        let parity_terms: Vec<PauliString> = (0..m).map(|i| island_term(i, &order)).collect();
        let mut gens = parity_terms.clone();
        gens.extend((0..m).map(|i| logical_z(i, &order)));
        let b = sector_basis_from(n, &gens, SectorLabel::free(0, 0))?;
        if b.dim() != 1 {
            return Err(Error::Verification(format!("island frame reference space has dimension {}", b.dim())));
        }
        let v0: State = b.columns()[0].iter().copied().collect();
        let xs: Vec<PauliString> = (0..m).map(|i| logical_x(i, &order)).collect();
        let states = (0u64..1 << m)
            .map(|s| (0..m).filter(|j| s >> j & 1 == 1).fold(v0.clone(), |acc, j| apply_pauli(&xs[j], &acc)))
            .collect();
        Ok(Self { order, states, parity_terms })
    }

    pub fn num_islands(&self) -> usize {
        self.parity_terms.len()
    }

    /// `H0` excitation energy of a JW basis state in units of `Delta`: twice the
    /// number of islands with odd parity.
    pub fn excitation(&self, s: u64) -> f64 {
        2.0 * self.parity_terms.iter().filter(|p| p.apply_basis_k(s).1 != 0).count() as f64
    }

    /// Matrix of an operator (given by its action on states) between frame states.
    pub fn matrix(&self, f: impl Fn(&State) -> State) -> Vec<Vec<C64>> {
        let d = self.states.len();
        let images: Vec<State> = self.states.iter().map(&f).collect();
        (0..d).map(|r| (0..d).map(|c| inner(&self.states[r], &images[c])).collect()).collect()
    }
}

/// `Z_i = i c_c c_d`.
pub fn logical_z(island: usize, order: &ModeOrder) -> PauliString {
    bilinear(mode_id(island, Letter::C), mode_id(island, Letter::D), order)
}

/// `X_i = i c_c c_a`.
pub fn logical_x(island: usize, order: &ModeOrder) -> PauliString {
    bilinear(mode_id(island, Letter::C), mode_id(island, Letter::A), order)
}

/// Pauli decomposition of a `2^m x 2^m` matrix.
pub fn pauli_decompose(m: &[Vec<C64>]) -> OperatorSum {
    let d = m.len();
    let nq = d.trailing_zeros() as usize;
    let mut out = OperatorSum::zero(nq);
    for x in 0..d as u128 {
        for z in 0..d as u128 {
            let p = PauliString::from_masks(nq, x, z, 0);
            // Tr(P^dagger M) / d
            let mut tr = zero();
            for r in 0..d as u64 {
                let (t, ph) = p.apply_basis(r);
                tr += ph.conj() * m[t as usize][r as usize];
            }
            let c = tr / d as f64;
            if c.norm() > 1e-13 {
                out.add_term(c, &p);
            }
        }
    }
    out
}

fn link_sum(lat: &SignedLattice, lambda: f64, order: &ModeOrder) -> OperatorSum {
    let mut v = OperatorSum::zero(order.num_qubits());
    for (id, _) in lat.active_links() {
        v.add_real(lambda, &link_term(lat, id, order));
    }
    v
}

/// `P- V (G V)^(k-1) P-` on island qubits, for `k = 1..=max_order`.
pub fn self_energy_terms(lat: &SignedLattice, delta: f64, lambda: f64, max_order: usize) -> Result<Vec<OperatorSum>> {
    if delta == 0.0 {
        return Err(Error::SingularResolvent);
    }
    let frame = IslandFrame::new(lat)?;
    let v = link_sum(lat, lambda, &frame.order);
    let resolvent = |st: &State| -> State {
        st.iter()
            .filter_map(|(&s, &a)| {
                let e = frame.excitation(s) * delta;
                (e != 0.0).then(|| (s, a / -e))
            })
            .collect()
    };
    let mut out = Vec::new();
    for k in 1..=max_order {
        let m = frame.matrix(|st| {
            let mut w = apply_op(&v, st);
            for _ in 1..k {
                w = apply_op(&v, &resolvent(&w));
            }
            w
        });
        out.push(pauli_decompose(&m));
    }
    Ok(out)
}

/// Island-qubit image of an operator projected onto the `H0` ground space.
pub fn project(lat: &SignedLattice, op: &OperatorSum) -> Result<OperatorSum> {
    let frame = IslandFrame::new(lat)?;
    Ok(pauli_decompose(&frame.matrix(|st| apply_op(op, st))))
}

/// Island-qubit image of each plaquette operator.
pub fn projected_plaquettes(lat: &SignedLattice) -> Result<Vec<OperatorSum>> {
    let frame = IslandFrame::new(lat)?;
    let order = &frame.order;
    lat.plaquettes()
        .map(|p| {
            let c = crate::fermion::mode_product(&p.operator_modes(), order);
            let mut op = OperatorSum::zero(order.num_qubits());
            op.add_real(1.0, &c);
            Ok(pauli_decompose(&frame.matrix(|st| apply_op(&op, st))))
        })
        .collect()
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SelfEnergyReport {
    pub delta: f64,
    pub lambda: f64,
    /// Identity coefficient of the order-2 term.
    pub order2_identity: f64,
    /// Norm of the order-2 term minus its identity part, relative to the identity part.
    pub order2_residual: f64,
    /// Largest coefficient of the order-3 term.
    pub order3_norm: f64,
    /// Coefficient of each projected plaquette operator in the order-4 term.
    pub coefficients: Vec<f64>,
    pub order4_identity: f64,
    /// Norm of the order-4 term after subtracting the plaquette and identity parts, relative.
    pub order4_residual: f64,
    /// `coefficient * Delta^3 / lambda^4` for the first plaquette.
    pub normalized_coefficient: f64,
    /// Island-qubit Pauli words of the projected plaquette operators, with sign.
    pub plaquette_words: Vec<String>,
}

fn norm(op: &OperatorSum) -> f64 {
    op.iter().map(|(c, _)| c.norm_sqr()).fold(0.0, |a, b| a + b).sqrt()
}

/// Orders 2, 3 and 4 of the expansion and the plaquette coefficient of order 4.
pub fn self_energy(lat: &SignedLattice, delta: f64, lambda: f64) -> Result<SelfEnergyReport> {
    let terms = self_energy_terms(lat, delta, lambda, 4)?;
    let nq = terms[0].num_qubits();
    let id = PauliString::identity(nq);
    let plaq = projected_plaquettes(lat)?;
    let mut words = Vec::new();
    let mut plaq_strings = Vec::new();
    for p in &plaq {
        let t: Vec<(C64, PauliString)> = p.iter().collect();
        if t.len() != 1 || (t[0].0.norm() - 1.0).abs() > 1e-10 || t[0].0.im.abs() > 1e-10 {
            return Err(Error::Verification("projected plaquette is not a single Pauli string".into()));
        }
        let s = if t[0].0.re > 0.0 { t[0].1 } else { t[0].1.negate() };
        words.push(s.to_string());
        plaq_strings.push(s);
    }

    let o2 = &terms[1];
    let i2 = o2.coefficient(&id).re;
    let mut r2 = o2.clone();
    r2.add_real(-i2, &id);
    let o3 = &terms[2];
    let n3 = o3.iter().map(|(c, _)| c.norm()).fold(0.0, f64::max);

    let o4 = &terms[3];
    let i4 = o4.coefficient(&id).re;
    let mut r4 = o4.clone();
    r4.add_real(-i4, &id);
    let mut coefficients = Vec::new();
    for s in &plaq_strings {
        // coefficient of the signed string: o4 holds c * phase(s) on the unsigned word
        let c = (o4.coefficient(&s.unsigned()) * s.unsigned().phase().conj() / s.phase()).re;
        coefficients.push(c);
        r4.add_real(-c, s);
    }
    let scale4 = norm(o4).max(1e-300);
    Ok(SelfEnergyReport {
        delta,
        lambda,
        order2_identity: i2,
        order2_residual: norm(&r2) / i2.abs().max(1e-300),
        order3_norm: n3,
        normalized_coefficient: coefficients.first().copied().unwrap_or(0.0) * delta.powi(3) / lambda.powi(4),
        coefficients,
        order4_identity: i4,
        order4_residual: norm(&r4) / scale4,
        plaquette_words: words,
    })
}

/// `P- (eps i c_x c_y) P-` on island qubits.
pub fn epsilon_projection(lat: &SignedLattice, island: usize, letters: (char, char), eps: f64) -> Result<OperatorSum> {
    let a = Letter::from_char(letters.0);
    let b = Letter::from_char(letters.1);
    let (a, b) = match (a, b) {
        (Some(a), Some(b)) if a != b => (a, b),
        _ => return Err(Error::ParityViolating(format!("{letters:?} is not a pair of distinct modes"))),
    };
    if island >= lat.num_islands() {
        return Err(Error::Config(format!("island {island} out of range")));
    }
    let frame = IslandFrame::new(lat)?;
    let mut op = OperatorSum::zero(frame.order.num_qubits());
    op.add_real(eps, &bilinear(mode_id(island, a), mode_id(island, b), &frame.order));
    Ok(pauli_decompose(&frame.matrix(|st| apply_op(&op, st))))
}

/// Single-Majorana perturbations change fermion parity and are always rejected.
pub fn epsilon_single_mode(_island: usize, letter: char) -> Result<OperatorSum> {
    Err(Error::ParityViolating(format!("single Majorana {letter}")))
}

/// Least-squares line through `(ln x, ln y)`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct PowerFit {
    pub exponent: f64,
    pub prefactor: f64,
    /// Largest absolute deviation of `ln y` from the fitted line.
    pub residual: f64,
}

pub fn power_fit(x: &[f64], y: &[f64]) -> Result<PowerFit> {
    if x.len() < 4 || x.len() != y.len() {
        return Err(Error::Fit { need: 4, got: x.len().min(y.len()) });
    }
    if x.iter().chain(y).any(|v| !(*v > 0.0)) {
        return Err(Error::Verification("power fit needs positive data".into()));
    }
    let lx: Vec<f64> = x.iter().map(|v| v.ln()).collect();
    let ly: Vec<f64> = y.iter().map(|v| v.ln()).collect();
    let n = lx.len() as f64;
    let mx = lx.iter().sum::<f64>() / n;
    let my = ly.iter().sum::<f64>() / n;
    let sxy: f64 = lx.iter().zip(&ly).map(|(a, b)| (a - mx) * (b - my)).sum();
    let sxx: f64 = lx.iter().map(|a| (a - mx).powi(2)).sum();
    let b = sxy / sxx;
    let a = my - b * mx;
    let residual = lx.iter().zip(&ly).map(|(u, v)| (a + b * u - v).abs()).fold(0.0, f64::max);
    Ok(PowerFit { exponent: b, prefactor: a.exp(), residual })
}

/// Exact small-torus energies at one coupling.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FitPoint {
    pub lambda: f64,
    /// Width of the lowest four levels of the all-`+1` sector.
    pub splitting: f64,
    /// Lowest energy with two white plaquettes flipped, above the ground state.
    pub plaquette_gap: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CoefficientFit {
    pub delta: f64,
    pub points: Vec<FitPoint>,
    pub splitting_fit: PowerFit,
    pub gap_fit: PowerFit,
    /// Gap at the smallest coupling divided by `2 * (5/16) lambda^4 / Delta^3`, per flipped plaquette.
    pub gap_ratio_to_plaquette_cost: f64,
}

/// Fits the ground-quartet splitting and the plaquette gap against `lambda` on the torus.
pub fn coefficient_fit(lat: &SignedLattice, delta: f64, lambdas: &[f64]) -> Result<CoefficientFit> {
    use crate::fermion::{build_h, conserved_set, ModelParams};
    use crate::sector::{block_eigenvalues, restrict, sector_basis};
    if lambdas.len() < 4 {
        return Err(Error::Fit { need: 4, got: lambdas.len() });
    }
    let order = jw_order(lat)?;
    let cs = conserved_set(lat, &order)?;
    let (nw, ng) = (cs.white.len(), cs.gray.len());
    if nw < 2 {
        return Err(Error::Lattice("plaquette gap needs two white plaquettes".into()));
    }
    let ground = sector_basis(&cs, &SectorLabel::all_plus(nw, ng))?;
    let mut pair = SectorLabel::all_plus(nw, ng);
    pair.c_w[0] = Some(-1);
    pair.c_w[1] = Some(-1);
    let excited = sector_basis(&cs, &pair)?;
    let mut points = Vec::new();
    for &lambda in lambdas {
        let h = build_h(lat, &ModelParams::new(delta, lambda), &order)?;
        let g = block_eigenvalues(&restrict(&h, &ground)?, Some(4))?;
        let e = block_eigenvalues(&restrict(&h, &excited)?, Some(1))?;
        points.push(FitPoint { lambda, splitting: g[3] - g[0], plaquette_gap: e[0] - g[0] });
    }
    let xs: Vec<f64> = points.iter().map(|p| p.lambda).collect();
    let splitting_fit = power_fit(&xs, &points.iter().map(|p| p.splitting).collect::<Vec<_>>())?;
    let gap_fit = power_fit(&xs, &points.iter().map(|p| p.plaquette_gap).collect::<Vec<_>>())?;
    let p0 = &points[0];
    let cost = 2.0 * 5.0 / 16.0 * p0.lambda.powi(4) / delta.powi(3);
    Ok(CoefficientFit {
        delta,
        gap_ratio_to_plaquette_cost: p0.plaquette_gap / 2.0 / cost,
        points,
        splitting_fit,
        gap_fit,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lattice::single_plaquette_cluster;

    #[test]
    fn frame_states_are_orthonormal() {
        let lat = single_plaquette_cluster().unwrap();
        let f = IslandFrame::new(&lat).unwrap();
        assert_eq!(f.states.len(), 16);
        for (i, a) in f.states.iter().enumerate() {
            for (j, b) in f.states.iter().enumerate() {
                let ip = inner(a, b);
                let want = if i == j { 1.0 } else { 0.0 };
                assert!((ip - C64::new(want, 0.0)).norm() < 1e-12);
            }
            assert!(a.keys().all(|&s| f.excitation(s) == 0.0));
        }
    }

    #[test]
    fn logical_operators_act_as_paulis() {
        let lat = single_plaquette_cluster().unwrap();
        let f = IslandFrame::new(&lat).unwrap();
        let mut z0 = OperatorSum::zero(8);
        z0.add_real(1.0, &logical_z(0, &f.order));
        let m = project(&lat, &z0).unwrap();
        assert_eq!(m.len(), 1);
        assert_eq!(m.coefficient(&PauliString::z(4, 0)), C64::new(1.0, 0.0));
    }

    #[test]
    fn power_fit_recovers_exponent() {
        let x = [0.1, 0.2, 0.3, 0.4];
        let y: Vec<f64> = x.iter().map(|v: &f64| 3.0 * v.powi(4)).collect();
        let f = power_fit(&x, &y).unwrap();
        assert!((f.exponent - 4.0).abs() < 1e-12 && (f.prefactor - 3.0).abs() < 1e-10);
        assert!(matches!(power_fit(&x[..3], &y[..3]), Err(Error::Fit { .. })));
    }

    #[test]
    fn resolvent_needs_gap() {
        let lat = single_plaquette_cluster().unwrap();
        assert!(matches!(self_energy(&lat, 0.0, 0.1), Err(Error::SingularResolvent)));
    }

    #[test]
    fn single_mode_is_rejected() {
        assert!(epsilon_single_mode(0, 'a').is_err());
        let lat = single_plaquette_cluster().unwrap();
        assert!(epsilon_projection(&lat, 0, ('a', 'a'), 0.1).is_err());
    }
}
