//! Dense and Krylov linear algebra for the Fock-space modules.
//!
//! Three kernels, all operating on real-symmetric (or complex-Hermitian via
//! matvec) operators:
//!
//! * [`symmetric_eigen`] — full eigendecomposition of a dense real symmetric
//!   matrix by Householder tridiagonalization followed by the implicit-shift
//!   QL iteration. Used for exact-diagonalization sectors up to a few
//!   thousand states.
//! * [`lowest_eigenpair`] — Lanczos iteration with full reorthogonalization
//!   for the smallest eigenpair of a large symmetric operator given only as
//!   a matrix-vector product.
//! * [`expv_hermitian`] — short-step Krylov approximation of the unitary
//!   action `y <- exp(-i dt H) y` for Hermitian `H`, with an a-posteriori
//!   error estimate per step.

use alloc::vec;
use alloc::vec::Vec;

use num_complex::Complex64;

#[cfg(not(feature = "std"))]
use num_traits::Float;

use crate::{Error, Result};

/// Eigendecomposition of a real symmetric matrix.
#[derive(Debug, Clone)]
pub struct SymmetricEigen {
    /// Eigenvalues in ascending order.
    pub values: Vec<f64>,
    /// Row-major `n x n` matrix whose column `j` (entries `vectors[i*n + j]`)
    /// is the unit eigenvector belonging to `values[j]`.
    pub vectors: Vec<f64>,
}

impl SymmetricEigen {
    /// Copies eigenvector `j` into a new vector.
    pub fn vector(&self, j: usize) -> Vec<f64> {
        let n = self.values.len();
        (0..n).map(|i| self.vectors[i * n + j]).collect()
    }
}

/// Householder reduction of the row-major symmetric matrix stored in `z` to
/// tridiagonal form (diagonal `d`, subdiagonal `e[1..]`), accumulating the
/// orthogonal transformation in `z`.
fn tred2(z: &mut [f64], n: usize, d: &mut [f64], e: &mut [f64]) {
    for i in (1..n).rev() {
        let l = i - 1;
        let mut h = 0.0;
        if l > 0 {
            let mut scale = 0.0;
            for k in 0..=l {
                scale += z[i * n + k].abs();
            }
            if scale == 0.0 {
                e[i] = z[i * n + l];
            } else {
                for k in 0..=l {
                    z[i * n + k] /= scale;
                    h += z[i * n + k] * z[i * n + k];
                }
                let f = z[i * n + l];
                let g = if f >= 0.0 { -h.sqrt() } else { h.sqrt() };
                e[i] = scale * g;
                h -= f * g;
                z[i * n + l] = f - g;
                let mut f_acc = 0.0;
                for j in 0..=l {
                    z[j * n + i] = z[i * n + j] / h;
                    let mut g = 0.0;
                    for k in 0..=j {
                        g += z[j * n + k] * z[i * n + k];
                    }
                    for k in (j + 1)..=l {
                        g += z[k * n + j] * z[i * n + k];
                    }
                    e[j] = g / h;
                    f_acc += e[j] * z[i * n + j];
                }
                let hh = f_acc / (h + h);
                for j in 0..=l {
                    let f = z[i * n + j];
                    let g = e[j] - hh * f;
                    e[j] = g;
                    for k in 0..=j {
                        z[j * n + k] -= f * e[k] + g * z[i * n + k];
                    }
                }
            }
        } else {
            e[i] = z[i * n + l];
        }
        d[i] = h;
    }
    d[0] = 0.0;
    e[0] = 0.0;
    for i in 0..n {
        if d[i] != 0.0 {
            for j in 0..i {
                let mut g = 0.0;
                for k in 0..i {
                    g += z[i * n + k] * z[k * n + j];
                }
                for k in 0..i {
                    z[k * n + j] -= g * z[k * n + i];
                }
            }
        }
        d[i] = z[i * n + i];
        z[i * n + i] = 1.0;
        for j in 0..i {
            z[j * n + i] = 0.0;
            z[i * n + j] = 0.0;
        }
    }
}

/// Implicit-shift QL iteration on the tridiagonal pair `(d, e)` produced by
/// [`tred2`], rotating the accumulated transformation `z` along so its
/// columns end up as eigenvectors.
fn tql2(d: &mut [f64], e: &mut [f64], z: &mut [f64], n: usize) -> Result<()> {
    for i in 1..n {
        e[i - 1] = e[i];
    }
    e[n - 1] = 0.0;
    for l in 0..n {
        let mut iter = 0;
        loop {
            let mut m = l;
            while m + 1 < n {
                let dd = d[m].abs() + d[m + 1].abs();
                if e[m].abs() <= f64::EPSILON * dd {
                    break;
                }
                m += 1;
            }
            if m == l {
                break;
            }
            if iter == 60 {
                return Err(Error::EigenFailure);
            }
            iter += 1;
            let mut g = (d[l + 1] - d[l]) / (2.0 * e[l]);
            let mut r = g.hypot(1.0);
            let denom = g + if g >= 0.0 { r.abs() } else { -r.abs() };
            g = d[m] - d[l] + e[l] / denom;
            let mut s = 1.0;
            let mut c = 1.0;
            let mut p = 0.0;
            let mut subdiagonal_vanished = false;
            for i in (l..m).rev() {
                let mut f = s * e[i];
                let b = c * e[i];
                r = f.hypot(g);
                e[i + 1] = r;
                if r == 0.0 {
                    d[i + 1] -= p;
                    e[m] = 0.0;
                    subdiagonal_vanished = true;
                    break;
                }
                s = f / r;
                c = g / r;
                g = d[i + 1] - p;
                r = (d[i] - g) * s + 2.0 * c * b;
                p = s * r;
                d[i + 1] = g + p;
                g = c * r - b;
                for k in 0..n {
                    f = z[k * n + i + 1];
                    z[k * n + i + 1] = s * z[k * n + i] + c * f;
                    z[k * n + i] = c * z[k * n + i] - s * f;
                }
            }
            if subdiagonal_vanished {
                continue;
            }
            d[l] -= p;
            e[l] = g;
            e[m] = 0.0;
        }
    }
    Ok(())
}

/// Full eigendecomposition of a dense real symmetric matrix given in
/// row-major order.
///
/// The input must be symmetric to about ten significant digits (guards
/// against assembly bugs upstream); it is explicitly symmetrized before the
/// reduction, so roundoff-level asymmetry is harmless. Eigenvalues are
/// returned in ascending order with orthonormal eigenvectors.
pub fn symmetric_eigen(matrix: &[f64], n: usize) -> Result<SymmetricEigen> {
    if matrix.len() != n * n {
        return Err(Error::DimensionMismatch { expected: n * n, found: matrix.len() });
    }
    if n == 0 {
        return Ok(SymmetricEigen { values: Vec::new(), vectors: Vec::new() });
    }
    let mut scale = 0.0f64;
    for v in matrix {
        if !v.is_finite() {
            return Err(Error::InvalidInput("matrix entries must be finite"));
        }
        scale = scale.max(v.abs());
    }
    let mut z = vec![0.0; n * n];
    for i in 0..n {
        for j in 0..n {
            let a = matrix[i * n + j];
            let b = matrix[j * n + i];
            if (a - b).abs() > 1e-9 * (1.0 + scale) {
                return Err(Error::InvalidInput("matrix is not symmetric"));
            }
            z[i * n + j] = 0.5 * (a + b);
        }
    }
    let mut d = vec![0.0; n];
    let mut e = vec![0.0; n];
    tred2(&mut z, n, &mut d, &mut e);
    tql2(&mut d, &mut e, &mut z, n)?;

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| d[a].total_cmp(&d[b]));
    let values: Vec<f64> = order.iter().map(|&j| d[j]).collect();
    let mut vectors = vec![0.0; n * n];
    for (jnew, &jold) in order.iter().enumerate() {
        for i in 0..n {
            vectors[i * n + jnew] = z[i * n + jold];
        }
    }
    Ok(SymmetricEigen { values, vectors })
}

/// Options for the Lanczos extremal-eigenpair solver.
#[derive(Debug, Clone, Copy)]
pub struct LanczosOptions {
    /// Maximum Krylov dimension before giving up.
    pub max_iter: usize,
    /// Absolute tolerance on the residual norm `|H x - lambda x|`.
    pub tol: f64,
}

impl Default for LanczosOptions {
    fn default() -> Self {
        LanczosOptions { max_iter: 400, tol: 1e-10 }
    }
}

/// Deterministic pseudo-random start vector component in `(-1, 1)`
/// (splitmix64 finalizer), so iterative solves are reproducible without an
/// RNG dependency.
fn hash_unit(i: u64) -> f64 {
    let mut x = i.wrapping_add(0x9e37_79b9_7f4a_7c15);
    x = (x ^ (x >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    x = (x ^ (x >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    x ^= x >> 31;
    (x >> 11) as f64 / (1u64 << 52) as f64 * 2.0 - 1.0
}

/// Smallest eigenvalue and eigenvector of a real symmetric operator supplied
/// as a matrix-vector product, by Lanczos iteration with full
/// reorthogonalization.
///
/// Deterministic: the start vector is a fixed hash sequence. Convergence is
/// declared when the Ritz residual estimate drops below `opts.tol`.
pub fn lowest_eigenpair<F>(dim: usize, mut matvec: F, opts: &LanczosOptions) -> Result<(f64, Vec<f64>)>
where
    F: FnMut(&[f64], &mut [f64]),
{
    if dim == 0 {
        return Err(Error::InvalidInput("operator dimension must be positive"));
    }
    let m_cap = opts.max_iter.min(dim);
    let mut basis: Vec<Vec<f64>> = Vec::with_capacity(m_cap);
    let mut alphas: Vec<f64> = Vec::with_capacity(m_cap);
    let mut betas: Vec<f64> = Vec::with_capacity(m_cap);

    let mut v: Vec<f64> = (0..dim).map(|i| hash_unit(i as u64)).collect();
    let norm = (v.iter().map(|x| x * x).sum::<f64>()).sqrt();
    for x in v.iter_mut() {
        *x /= norm;
    }
    let mut w = vec![0.0; dim];

    for m in 1..=m_cap {
        basis.push(v.clone());
        matvec(&v, &mut w);
        let alpha: f64 = v.iter().zip(w.iter()).map(|(a, b)| a * b).sum();
        alphas.push(alpha);
        // Two-pass Gram-Schmidt against the whole basis keeps the Krylov
        // vectors orthogonal at double precision.
        for _ in 0..2 {
            for b in &basis {
                let proj: f64 = b.iter().zip(w.iter()).map(|(a, c)| a * c).sum();
                for (wi, bi) in w.iter_mut().zip(b.iter()) {
                    *wi -= proj * bi;
                }
            }
        }
        let beta = (w.iter().map(|x| x * x).sum::<f64>()).sqrt();

        // Ritz pair of the current tridiagonal projection.
        let mut t = vec![0.0; m * m];
        for j in 0..m {
            t[j * m + j] = alphas[j];
            if j + 1 < m {
                t[j * m + j + 1] = betas[j];
                t[(j + 1) * m + j] = betas[j];
            }
        }
        let eig = symmetric_eigen(&t, m)?;
        let residual = beta * eig.vectors[(m - 1) * m].abs();
        let exhausted = beta <= 1e-14 || m == dim;
        if residual <= opts.tol || exhausted {
            let mut x = vec![0.0; dim];
            for (j, b) in basis.iter().enumerate() {
                let coeff = eig.vectors[j * m];
                for (xi, bi) in x.iter_mut().zip(b.iter()) {
                    *xi += coeff * bi;
                }
            }
            let xn = (x.iter().map(|c| c * c).sum::<f64>()).sqrt();
            for c in x.iter_mut() {
                *c /= xn;
            }
            return Ok((eig.values[0], x));
        }

        betas.push(beta);
        for (vi, wi) in v.iter_mut().zip(w.iter()) {
            *vi = wi / beta;
        }
    }
    Err(Error::EigenFailure)
}

/// Options for the Krylov propagator.
#[derive(Debug, Clone, Copy)]
pub struct KrylovOptions {
    /// Maximum Krylov dimension per step.
    pub max_dim: usize,
    /// Relative error target per step.
    pub tol: f64,
}

impl Default for KrylovOptions {
    fn default() -> Self {
        KrylovOptions { max_dim: 48, tol: 1e-10 }
    }
}

/// Applies the unitary `exp(-i dt H)` to `y` in place, where the Hermitian
/// operator `H` is supplied as a matrix-vector product.
///
/// A Lanczos basis is grown until the a-posteriori estimate of the neglected
/// coupling, `beta_{m+1} |dt| |u_m|`, falls below `tol * |y|`, or until happy
/// breakdown makes the projection exact. Designed for short steps
/// (`|dt| * |H|` of order one or less); fails with [`Error::EigenFailure`]
/// if the basis cap is reached first.
pub fn expv_hermitian<F>(
    mut matvec: F,
    dt: f64,
    y: &mut [Complex64],
    opts: &KrylovOptions,
) -> Result<()>
where
    F: FnMut(&[Complex64], &mut [Complex64]),
{
    let dim = y.len();
    if dim == 0 || dt == 0.0 {
        return Ok(());
    }
    if !dt.is_finite() {
        return Err(Error::InvalidInput("time step must be finite"));
    }
    let y_norm = (y.iter().map(|c| c.norm_sqr()).sum::<f64>()).sqrt();
    if y_norm == 0.0 {
        return Ok(());
    }

    let m_cap = opts.max_dim.min(dim);
    let mut basis: Vec<Vec<Complex64>> = Vec::with_capacity(m_cap);
    let mut alphas: Vec<f64> = Vec::with_capacity(m_cap);
    let mut betas: Vec<f64> = Vec::with_capacity(m_cap);

    let mut v: Vec<Complex64> = y.iter().map(|c| c / y_norm).collect();
    let mut w = vec![Complex64::new(0.0, 0.0); dim];

    for m in 1..=m_cap {
        basis.push(v.clone());
        matvec(&v, &mut w);
        // Hermitian operators have real diagonal projections; the imaginary
        // part is roundoff and is dropped.
        let alpha: f64 = v.iter().zip(w.iter()).map(|(a, b)| (a.conj() * b).re).sum();
        alphas.push(alpha);
        for _ in 0..2 {
            for b in &basis {
                let proj: Complex64 = b.iter().zip(w.iter()).map(|(a, c)| a.conj() * c).sum();
                for (wi, bi) in w.iter_mut().zip(b.iter()) {
                    *wi -= proj * bi;
                }
            }
        }
        let beta = (w.iter().map(|c| c.norm_sqr()).sum::<f64>()).sqrt();

        let mut t = vec![0.0; m * m];
        for j in 0..m {
            t[j * m + j] = alphas[j];
            if j + 1 < m {
                t[j * m + j + 1] = betas[j];
                t[(j + 1) * m + j] = betas[j];
            }
        }
        let eig = symmetric_eigen(&t, m)?;
        // u = Q exp(-i dt Lambda) Q^T e_1 is the propagated state in the
        // Krylov coordinates.
        let mut u = vec![Complex64::new(0.0, 0.0); m];
        for j in 0..m {
            let phase = Complex64::from_polar(1.0, -dt * eig.values[j]);
            let weight = eig.vectors[j]; // component 0 of eigenvector j
            for (k, uk) in u.iter_mut().enumerate() {
                *uk += eig.vectors[k * m + j] * phase * weight;
            }
        }
        let err = beta * dt.abs() * u[m - 1].norm();
        if err <= opts.tol || beta <= 1e-14 || m == dim {
            for c in y.iter_mut() {
                *c = Complex64::new(0.0, 0.0);
            }
            for (j, b) in basis.iter().enumerate() {
                let coeff = y_norm * u[j];
                for (yi, bi) in y.iter_mut().zip(b.iter()) {
                    *yi += coeff * bi;
                }
            }
            return Ok(());
        }

        betas.push(beta);
        for (vi, wi) in v.iter_mut().zip(w.iter()) {
            *vi = wi / beta;
        }
    }
    Err(Error::EigenFailure)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use rand::rngs::StdRng;
    use rand::{Rng, SeedableRng};

    fn random_symmetric(n: usize, rng: &mut StdRng) -> Vec<f64> {
        let mut a = vec![0.0; n * n];
        for i in 0..n {
            for j in 0..=i {
                let v: f64 = rng.gen_range(-1.0..1.0);
                a[i * n + j] = v;
                a[j * n + i] = v;
            }
        }
        a
    }

    fn residual_norm(a: &[f64], n: usize, eig: &SymmetricEigen) -> f64 {
        let mut worst = 0.0f64;
        for j in 0..n {
            let mut r = 0.0;
            for i in 0..n {
                let mut av = 0.0;
                for k in 0..n {
                    av += a[i * n + k] * eig.vectors[k * n + j];
                }
                let diff = av - eig.values[j] * eig.vectors[i * n + j];
                r += diff * diff;
            }
            worst = worst.max(r.sqrt());
        }
        worst
    }

    #[test]
    fn two_by_two_exact() {
        let a = [2.0, 1.0, 1.0, 2.0];
        let eig = symmetric_eigen(&a, 2).unwrap();
        assert!((eig.values[0] - 1.0).abs() < 1e-14);
        assert!((eig.values[1] - 3.0).abs() < 1e-14);
        let v0 = eig.vector(0);
        let overlap = (v0[0] - v0[1]).abs() / 2f64.sqrt();
        assert!((overlap - 1.0).abs() < 1e-14 || (v0[0] + v0[1]).abs() < 1e-14);
    }

    #[test]
    fn diagonal_matrix_sorted() {
        let a = [3.0, 0.0, 0.0, 0.0, -1.0, 0.0, 0.0, 0.0, 2.0];
        let eig = symmetric_eigen(&a, 3).unwrap();
        assert!((eig.values[0] + 1.0).abs() < 1e-14);
        assert!((eig.values[1] - 2.0).abs() < 1e-14);
        assert!((eig.values[2] - 3.0).abs() < 1e-14);
        // Eigenvector of the smallest eigenvalue is e_1.
        let v = eig.vector(0);
        assert!(v[1].abs() > 1.0 - 1e-12);
    }

    #[test]
    fn discrete_laplacian_spectrum() {
        // Tridiagonal (-1, 2, -1): eigenvalues 2 - 2 cos(k pi / (n+1)).
        let n = 12;
        let mut a = vec![0.0; n * n];
        for i in 0..n {
            a[i * n + i] = 2.0;
            if i + 1 < n {
                a[i * n + i + 1] = -1.0;
                a[(i + 1) * n + i] = -1.0;
            }
        }
        let eig = symmetric_eigen(&a, n).unwrap();
        for k in 1..=n {
            let exact = 2.0 - 2.0 * (k as f64 * core::f64::consts::PI / (n as f64 + 1.0)).cos();
            assert!(
                (eig.values[k - 1] - exact).abs() < 1e-12,
                "k={k}: {} vs {exact}",
                eig.values[k - 1]
            );
        }
    }

    #[test]
    fn random_matrix_full_checks() {
        let mut rng = StdRng::seed_from_u64(7);
        let n = 40;
        let a = random_symmetric(n, &mut rng);
        let eig = symmetric_eigen(&a, n).unwrap();
        assert!(residual_norm(&a, n, &eig) < 1e-10);
        // Orthonormality.
        for i in 0..n {
            for j in i..n {
                let dot: f64 = (0..n).map(|k| eig.vectors[k * n + i] * eig.vectors[k * n + j]).sum();
                let expected = if i == j { 1.0 } else { 0.0 };
                assert!((dot - expected).abs() < 1e-10, "({i},{j}): {dot}");
            }
        }
        // Trace preserved.
        let trace: f64 = (0..n).map(|i| a[i * n + i]).sum();
        let sum: f64 = eig.values.iter().sum();
        assert!((trace - sum).abs() < 1e-9);
    }

    #[test]
    fn rejects_bad_inputs() {
        assert!(symmetric_eigen(&[1.0, 2.0, 3.0], 2).is_err());
        let asym = [0.0, 1.0, -1.0, 0.0];
        assert!(symmetric_eigen(&asym, 2).is_err());
        let nan = [f64::NAN, 0.0, 0.0, 1.0];
        assert!(symmetric_eigen(&nan, 2).is_err());
        assert!(symmetric_eigen(&[], 0).unwrap().values.is_empty());
    }

    #[test]
    fn lanczos_matches_dense_ground_state() {
        let mut rng = StdRng::seed_from_u64(11);
        let n = 60;
        let a = random_symmetric(n, &mut rng);
        let dense = symmetric_eigen(&a, n).unwrap();
        let (lam, x) = lowest_eigenpair(
            n,
            |v, out| {
                for i in 0..n {
                    out[i] = (0..n).map(|k| a[i * n + k] * v[k]).sum();
                }
            },
            &LanczosOptions::default(),
        )
        .unwrap();
        assert!((lam - dense.values[0]).abs() < 1e-9, "{lam} vs {}", dense.values[0]);
        let v0 = dense.vector(0);
        let overlap: f64 = v0.iter().zip(x.iter()).map(|(a, b)| a * b).sum();
        assert!(overlap.abs() > 1.0 - 1e-8, "overlap {overlap}");
    }

    #[test]
    fn lanczos_on_diagonal_operator() {
        let diag: Vec<f64> = (0..200).map(|i| (i as f64) * 0.1 - 3.0).collect();
        let (lam, x) = lowest_eigenpair(
            200,
            |v, out| {
                for (o, (d, vi)) in out.iter_mut().zip(diag.iter().zip(v.iter())) {
                    *o = d * vi;
                }
            },
            &LanczosOptions::default(),
        )
        .unwrap();
        assert!((lam + 3.0).abs() < 1e-9);
        assert!(x[0].abs() > 1.0 - 1e-7);
    }

    #[test]
    fn expv_two_level_rabi() {
        // H = sigma_x: exp(-i theta sigma_x)(1,0) = (cos theta, -i sin theta).
        let theta = 0.4321;
        let mut y = [Complex64::new(1.0, 0.0), Complex64::new(0.0, 0.0)];
        expv_hermitian(
            |v, out| {
                out[0] = v[1];
                out[1] = v[0];
            },
            theta,
            &mut y,
            &KrylovOptions::default(),
        )
        .unwrap();
        assert!((y[0] - Complex64::new(theta.cos(), 0.0)).norm() < 1e-12);
        assert!((y[1] - Complex64::new(0.0, -theta.sin())).norm() < 1e-12);
    }

    #[test]
    fn expv_eigenvector_picks_up_pure_phase() {
        // Happy breakdown at the first iteration.
        let diag = [1.5, -0.7, 0.2];
        let mut y = [
            Complex64::new(0.0, 0.0),
            Complex64::new(0.6, 0.8),
            Complex64::new(0.0, 0.0),
        ];
        expv_hermitian(
            |v, out| {
                for k in 0..3 {
                    out[k] = diag[k] * v[k];
                }
            },
            2.0,
            &mut y,
            &KrylovOptions::default(),
        )
        .unwrap();
        let expected = Complex64::new(0.6, 0.8) * Complex64::from_polar(1.0, -2.0 * -0.7);
        assert!((y[1] - expected).norm() < 1e-12);
        assert!(y[0].norm() < 1e-14 && y[2].norm() < 1e-14);
    }

    #[test]
    fn expv_matches_dense_propagation() {
        let mut rng = StdRng::seed_from_u64(23);
        let n = 30;
        let a = random_symmetric(n, &mut rng);
        let mut y: Vec<Complex64> = (0..n)
            .map(|_| Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)))
            .collect();
        let norm = y.iter().map(|c| c.norm_sqr()).sum::<f64>().sqrt();
        for c in y.iter_mut() {
            *c /= norm;
        }
        let dt = 0.37;
        // Dense oracle through the eigendecomposition.
        let eig = symmetric_eigen(&a, n).unwrap();
        let mut oracle = vec![Complex64::new(0.0, 0.0); n];
        for j in 0..n {
            let mut proj = Complex64::new(0.0, 0.0);
            for i in 0..n {
                proj += eig.vectors[i * n + j] * y[i];
            }
            let phase = Complex64::from_polar(1.0, -dt * eig.values[j]);
            for i in 0..n {
                oracle[i] += eig.vectors[i * n + j] * phase * proj;
            }
        }
        expv_hermitian(
            |v, out| {
                for i in 0..n {
                    out[i] = (0..n).map(|k| a[i * n + k] * v[k]).sum();
                }
            },
            dt,
            &mut y,
            &KrylovOptions::default(),
        )
        .unwrap();
        let diff: f64 = y.iter().zip(oracle.iter()).map(|(a, b)| (a - b).norm_sqr()).sum::<f64>().sqrt();
        assert!(diff < 1e-9, "difference {diff}");
    }

    #[test]
    fn expv_preserves_norm_over_many_steps() {
        let mut rng = StdRng::seed_from_u64(31);
        let n = 25;
        let a = random_symmetric(n, &mut rng);
        let mut y: Vec<Complex64> = (0..n)
            .map(|_| Complex64::new(rng.gen_range(-1.0..1.0), 0.0))
            .collect();
        let norm = y.iter().map(|c| c.norm_sqr()).sum::<f64>().sqrt();
        for c in y.iter_mut() {
            *c /= norm;
        }
        for _ in 0..200 {
            expv_hermitian(
                |v, out| {
                    for i in 0..n {
                        out[i] = (0..n).map(|k| a[i * n + k] * v[k]).sum();
                    }
                },
                0.05,
                &mut y,
                &KrylovOptions::default(),
            )
            .unwrap();
        }
        let drift = (y.iter().map(|c| c.norm_sqr()).sum::<f64>().sqrt() - 1.0).abs();
        assert!(drift < 1e-9, "norm drift {drift}");
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(48))]

        #[test]
        fn eigen_invariants_hold(seed in 0u64..500, n in 2usize..9) {
            let mut rng = StdRng::seed_from_u64(seed);
            let a = random_symmetric(n, &mut rng);
            let eig = symmetric_eigen(&a, n).unwrap();
            prop_assert!(residual_norm(&a, n, &eig) < 1e-11);
            for w in eig.values.windows(2) {
                prop_assert!(w[0] <= w[1] + 1e-13);
            }
            let trace: f64 = (0..n).map(|i| a[i * n + i]).sum();
            let sum: f64 = eig.values.iter().sum();
            prop_assert!((trace - sum).abs() < 1e-11);
        }
    }
}
