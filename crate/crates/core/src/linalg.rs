//! Hermitian eigensolvers: dense for small blocks, restarted block Lanczos
//! with full reorthogonalization for large matrix-free problems.

use nalgebra::{ComplexField, DMatrix, DVector};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};

/// Scalar usable by the solvers (`f64` or `Complex<f64>`).
pub trait Scalar: ComplexField<RealField = f64> + Copy {
    fn random(rng: &mut ChaCha8Rng) -> Self;
}

impl Scalar for f64 {
    fn random(rng: &mut ChaCha8Rng) -> Self {
        rng.random::<f64>() - 0.5
    }
}

impl Scalar for num_complex::Complex64 {
    fn random(rng: &mut ChaCha8Rng) -> Self {
        num_complex::Complex64::new(rng.random::<f64>() - 0.5, rng.random::<f64>() - 0.5)
    }
}

/// Ascending eigenvalues and matching eigenvector columns of a Hermitian matrix.
pub fn eigh<T: Scalar>(m: DMatrix<T>) -> (Vec<f64>, DMatrix<T>) {
    let n = m.nrows();
    if n == 0 {
        return (Vec::new(), m);
    }
    let e = m.symmetric_eigen();
    let mut idx: Vec<usize> = (0..n).collect();
    idx.sort_by(|&a, &b| e.eigenvalues[a].total_cmp(&e.eigenvalues[b]));
    let vals = idx.iter().map(|&i| e.eigenvalues[i]).collect();
    let vecs = DMatrix::from_fn(n, n, |r, c| e.eigenvectors[(r, idx[c])]);
    (vals, vecs)
}

/// Ascending eigenvalues only.
pub fn eigvalsh<T: Scalar>(m: DMatrix<T>) -> Vec<f64> {
    let mut v: Vec<f64> = m.symmetric_eigenvalues().iter().copied().collect();
    v.sort_by(f64::total_cmp);
    v
}

#[derive(Clone, Copy, Debug)]
pub struct LanczosOptions {
    /// Residual norm target for every requested pair.
    pub tol: f64,
    /// Maximum Krylov subspace size before a restart.
    pub max_subspace: usize,
    pub max_restarts: usize,
    pub seed: u64,
}

impl Default for LanczosOptions {
    fn default() -> Self {
        Self { tol: 1e-10, max_subspace: 80, max_restarts: 200, seed: 0x5eed }
    }
}

/// Lowest eigenpairs from a restarted block Lanczos iteration.
#[derive(Clone, Debug)]
pub struct Eigenpairs<T: Scalar> {
    pub values: Vec<f64>,
    pub vectors: Vec<DVector<T>>,
    pub residuals: Vec<f64>,
    pub matvecs: usize,
}

fn dot<T: Scalar>(a: &DVector<T>, b: &DVector<T>) -> T {
    a.dotc(b)
}

/// Orthonormalizes `w` against `basis` (twice) and normalizes; `None` if it collapses.
fn orthonormalize<T: Scalar>(mut w: DVector<T>, basis: &[DVector<T>]) -> Option<DVector<T>> {
    let n0 = w.norm();
    if n0 == 0.0 {
        return None;
    }
    for _ in 0..2 {
        for v in basis {
            let c = dot(v, &w);
            w.axpy(-c, v, T::one());
        }
    }
    let n1 = w.norm();
    if n1 < 1e-10 * n0.max(1e-300) || n1 < 1e-14 {
        return None;
    }
    Some(w.unscale(n1))
}

/// Lowest `k` eigenpairs of the Hermitian operator `apply` of dimension `dim`.
pub fn lanczos_lowest<T, F>(apply: F, dim: usize, k: usize, opts: &LanczosOptions) -> Result<Eigenpairs<T>>
where
    T: Scalar,
    F: Fn(&DVector<T>) -> DVector<T>,
{
    let k = k.min(dim);
    if k == 0 {
        return Ok(Eigenpairs { values: vec![], vectors: vec![], residuals: vec![], matvecs: 0 });
    }
    let block = (k + 2).min(dim);
    let m = opts.max_subspace.max(3 * block).min(dim);
    let mut matvecs = 0usize;

    if dim <= m {
        let cols: Vec<DVector<T>> = (0..dim)
            .map(|j| {
                matvecs += 1;
                apply(&DVector::from_fn(dim, |i, _| if i == j { T::one() } else { T::zero() }))
            })
            .collect();
        let h = DMatrix::from_columns(&cols);
        let h = (&h + h.adjoint()).scale(0.5);
        let (vals, vecs) = eigh(h);
        return Ok(Eigenpairs {
            values: vals[..k].to_vec(),
            vectors: (0..k).map(|c| vecs.column(c).into_owned()).collect(),
            residuals: vec![0.0; k],
            matvecs,
        });
    }

    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
    let mut basis: Vec<DVector<T>> = Vec::new();
    let mut images: Vec<DVector<T>> = Vec::new();
    let mut next: Vec<DVector<T>> = (0..block).map(|_| DVector::from_fn(dim, |_, _| T::random(&mut rng))).collect();

    // projected matrix, grown as columns are added
    let mut t = DMatrix::<T>::zeros(m, m);
    let mut filled = 0usize;
    for _restart in 0..=opts.max_restarts {
        while basis.len() < m {
            let mut added = Vec::new();
            for w in next.drain(..) {
                if basis.len() >= m {
                    break;
                }
                if let Some(v) = orthonormalize(w, &basis) {
                    basis.push(v);
                    added.push(basis.len() - 1);
                }
            }
            if added.is_empty() {
                break;
            }
            for &i in &added {
                matvecs += 1;
                images.push(apply(&basis[i]));
            }
            next = added.iter().map(|&i| images[i].clone()).collect();
        }

        let nb = basis.len();
        for c in filled..nb {
            for r in 0..=c {
                let v = dot(&basis[r], &images[c]);
                t[(r, c)] = v;
                t[(c, r)] = v.conjugate();
            }
            t[(c, c)] = T::from_real(t[(c, c)].real());
        }
        let (theta, s) = eigh(t.view((0, 0), (nb, nb)).into_owned());
        let keep = (k + block).min(nb);
        let mut ritz = Vec::with_capacity(keep);
        let mut ritz_img = Vec::with_capacity(keep);
        let mut res = Vec::with_capacity(keep);
        for c in 0..keep {
            let mut y = DVector::zeros(dim);
            let mut ay = DVector::zeros(dim);
            for r in 0..nb {
                y.axpy(s[(r, c)], &basis[r], T::one());
                ay.axpy(s[(r, c)], &images[r], T::one());
            }
            let mut r = ay.clone();
            r.axpy(T::from_real(-theta[c]), &y, T::one());
            res.push(r);
            ritz.push(y);
            ritz_img.push(ay);
        }
        let norms: Vec<f64> = res.iter().map(|r| r.norm()).collect();
        let scale = theta.iter().map(|t| t.abs()).fold(1.0, f64::max);
        if norms[..k].iter().all(|&n| n <= opts.tol * scale) || nb == dim {
            return Ok(Eigenpairs {
                values: theta[..k].to_vec(),
                vectors: ritz.into_iter().take(k).collect(),
                residuals: norms[..k].to_vec(),
                matvecs,
            });
        }
        basis = ritz;
        images = ritz_img;
        filled = basis.len();
        t.fill(T::zero());
        for (c, &v) in theta[..filled].iter().enumerate() {
            t[(c, c)] = T::from_real(v);
        }
        next = res.into_iter().zip(norms).filter(|(_, n)| *n > 0.0).map(|(r, _)| r).take(block).collect();
        if next.is_empty() {
            next = (0..block).map(|_| DVector::from_fn(dim, |_, _| T::random(&mut rng))).collect();
        }
    }
    Err(Error::NoConvergence(format!("block Lanczos, dim {dim}, k {k}")))
}

/// Groups ascending eigenvalues into degenerate clusters.
pub fn degeneracy_groups(values: &[f64], rel: f64, abs: f64) -> Vec<usize> {
    let mut ids = Vec::with_capacity(values.len());
    let mut g = 0usize;
    for (i, &v) in values.iter().enumerate() {
        if i > 0 {
            let p = values[i - 1];
            let tol = (rel * p.abs().max(v.abs())).max(abs);
            if (v - p).abs() > tol {
                g += 1;
            }
        }
        ids.push(g);
    }
    ids
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_complex::Complex64;

    fn laplacian(n: usize) -> DMatrix<f64> {
        DMatrix::from_fn(n, n, |r, c| {
            if r == c {
                2.0
            } else if r.abs_diff(c) == 1 {
                -1.0
            } else {
                0.0
            }
        })
    }

    #[test]
    fn dense_sorted() {
        let m = DMatrix::from_row_slice(2, 2, &[0.0, 1.0, 1.0, 0.0]);
        let (v, vecs) = eigh(m.clone());
        assert!((v[0] + 1.0).abs() < 1e-14 && (v[1] - 1.0).abs() < 1e-14);
        let r = &m * vecs.column(0) - vecs.column(0) * v[0];
        assert!(r.norm() < 1e-14);
    }

    #[test]
    fn complex_hermitian() {
        let i = Complex64::i();
        let one = Complex64::new(1.0, 0.0);
        let zero = Complex64::new(0.0, 0.0);
        let y = DMatrix::from_row_slice(2, 2, &[zero, -i, i, zero]);
        let v = eigvalsh(y + DMatrix::identity(2, 2) * one);
        assert!((v[0] - 0.0).abs() < 1e-14 && (v[1] - 2.0).abs() < 1e-14);
    }

    #[test]
    fn lanczos_matches_dense_laplacian() {
        let n = 400;
        let m = laplacian(n);
        let exact: Vec<f64> =
            (1..=4).map(|j| 2.0 - 2.0 * (j as f64 * std::f64::consts::PI / (n as f64 + 1.0)).cos()).collect();
        let r = lanczos_lowest(|x: &DVector<f64>| &m * x, n, 4, &LanczosOptions { tol: 1e-9, ..Default::default() })
            .unwrap();
        for (a, b) in r.values.iter().zip(&exact) {
            assert!((a - b).abs() < 1e-9, "{a} vs {b}");
        }
    }

    #[test]
    fn lanczos_resolves_degeneracy() {
        let n = 300;
        let diag: Vec<f64> = (0..n).map(|i| if i < 3 { -1.0 } else { i as f64 / n as f64 }).collect();
        let r = lanczos_lowest(
            |x: &DVector<f64>| DVector::from_fn(n, |i, _| diag[i] * x[i]),
            n,
            4,
            &LanczosOptions::default(),
        )
        .unwrap();
        assert!(r.values[..3].iter().all(|v| (v + 1.0).abs() < 1e-10));
        assert!((r.values[3] - 3.0 / n as f64).abs() < 1e-10);
    }

    #[test]
    fn small_problem_goes_dense() {
        let m = laplacian(10);
        let r = lanczos_lowest(|x: &DVector<f64>| &m * x, 10, 2, &LanczosOptions::default()).unwrap();
        assert_eq!(r.matvecs, 10);
    }

    #[test]
    fn grouping() {
        let g = degeneracy_groups(&[-1.0, -1.0 + 1e-12, 0.0, 1e-11, 0.5], 1e-8, 1e-10);
        assert_eq!(g, vec![0, 0, 1, 1, 2]);
    }
}
