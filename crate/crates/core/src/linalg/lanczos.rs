use nalgebra::{DMatrix, SymmetricEigen};
use num_complex::Complex64;

use super::{real, CVector, ZERO};
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy)]
pub struct LanczosOptions {
    /// Maximum Krylov dimension (per step, for propagation).
    pub max_basis: usize,
    /// Relative tolerance.
    pub tol: f64,
}

impl Default for LanczosOptions {
    fn default() -> Self {
        Self { max_basis: 400, tol: 1e-10 }
    }
}

/// Deterministic, non-degenerate start vector.
fn start_vector(dim: usize) -> CVector {
    let v = CVector::from_fn(dim, |i, _| {
        let x = i as f64 + 1.0;
        Complex64::new(1.0 + 0.3 * (0.7 * x).sin(), 0.2 * (1.3 * x).cos())
    });
    let n = v.norm();
    v / real(n)
}

/// Orthogonalizes `z` against `basis` twice (classical Gram-Schmidt, repeated).
fn reorthogonalize(z: &mut CVector, basis: &[CVector]) {
    for _ in 0..2 {
        for q in basis {
            let proj = q.dotc(z);
            z.axpy(-proj, q, Complex64::new(1.0, 0.0));
        }
    }
}

fn tridiagonal(alphas: &[f64], betas: &[f64]) -> SymmetricEigen<f64, nalgebra::Dyn> {
    let k = alphas.len();
    let mut t = DMatrix::<f64>::zeros(k, k);
    for i in 0..k {
        t[(i, i)] = alphas[i];
        if i + 1 < k {
            t[(i + 1, i)] = betas[i];
            t[(i, i + 1)] = betas[i];
        }
    }
    t.symmetric_eigen()
}

/// Smallest and largest eigenvalue of a Hermitian operator given by its action.
pub fn hermitian_extremes<F>(apply: F, dim: usize, opts: LanczosOptions) -> Result<(f64, f64)>
where
    F: Fn(&CVector) -> CVector,
{
    assert!(dim > 0);
    let mut basis = vec![start_vector(dim)];
    let mut alphas: Vec<f64> = Vec::new();
    let mut betas: Vec<f64> = Vec::new();
    let mut last_change = f64::INFINITY;
    let max_iter = opts.max_basis.min(dim);

    for j in 0..max_iter {
        let mut z = apply(&basis[j]);
        let alpha = basis[j].dotc(&z).re;
        alphas.push(alpha);
        reorthogonalize(&mut z, &basis);
        let beta = z.norm();

        let eig = tridiagonal(&alphas, &betas);
        let (imin, imax) = extreme_indices(eig.eigenvalues.as_slice());
        let (lo, hi) = (eig.eigenvalues[imin], eig.eigenvalues[imax]);
        let scale = lo.abs().max(hi.abs()).max(f64::MIN_POSITIVE);
        let last = alphas.len() - 1;
        let res_lo = beta * eig.eigenvectors[(last, imin)].abs();
        let res_hi = beta * eig.eigenvectors[(last, imax)].abs();
        last_change = res_lo.max(res_hi) / scale;

        let exhausted = j + 1 == dim || beta <= 1e-14 * scale;
        if exhausted || (j >= 2 && last_change <= opts.tol) {
            return Ok((lo, hi));
        }
        betas.push(beta);
        basis.push(z / real(beta));
    }
    Err(Error::Estimation { iterations: max_iter, residual: last_change })
}

fn extreme_indices(values: &[f64]) -> (usize, usize) {
    let mut imin = 0;
    let mut imax = 0;
    for (i, v) in values.iter().enumerate() {
        if *v < values[imin] {
            imin = i;
        }
        if *v > values[imax] {
            imax = i;
        }
    }
    (imin, imax)
}

/// Computes `exp(-i H t) w` for Hermitian `H` with restarted Lanczos time stepping.
///
/// The a posteriori estimate `beta_m |e_m^T exp(-i tau T_m) e_1|` is kept below
/// `tol * |w| * tau / t` on every substep.
pub fn krylov_propagate<F>(apply: F, w: &CVector, t: f64, basis_size: usize, tol: f64) -> Result<CVector>
where
    F: Fn(&CVector) -> CVector,
{
    let norm_w = w.norm();
    if norm_w == 0.0 || t == 0.0 {
        return Ok(w.clone());
    }
    let dim = w.len();
    let m = basis_size.clamp(1, dim);
    let total = t.abs();
    let sign = t.signum();
    let mut v = w.clone();
    let mut remaining = total;
    let mut tau = total;

    while remaining > 0.0 {
        let beta0 = v.norm();
        let mut basis = vec![&v / real(beta0)];
        let mut alphas = Vec::with_capacity(m);
        let mut betas = Vec::with_capacity(m);
        let mut tail = 0.0;
        for j in 0..m {
            let mut z = apply(&basis[j]);
            let alpha = basis[j].dotc(&z).re;
            alphas.push(alpha);
            reorthogonalize(&mut z, &basis);
            let beta = z.norm();
            let scale = alphas.iter().fold(1e-300_f64, |a, x| a.max(x.abs()));
            if beta <= 1e-13 * scale {
                // invariant subspace: the projection is exact
                tail = 0.0;
                break;
            }
            tail = beta;
            if j + 1 < m {
                betas.push(beta);
                basis.push(z / real(beta));
            }
        }
        let k = alphas.len();
        let eig = tridiagonal(&alphas, &betas[..k - 1]);

        let mut accepted_first = true;
        let coeffs = loop {
            tau = tau.min(remaining);
            let y: Vec<Complex64> = (0..k)
                .map(|r| {
                    (0..k).fold(ZERO, |acc, c| {
                        let phase = Complex64::new(0.0, -sign * eig.eigenvalues[c] * tau).exp();
                        acc + real(eig.eigenvectors[(r, c)] * eig.eigenvectors[(0, c)]) * phase
                    })
                })
                .collect();
            let err = tail * y[k - 1].norm() * beta0;
            if err <= tol * norm_w * (tau / total) {
                break y;
            }
            accepted_first = false;
            tau *= 0.5;
            if tau < total * 1e-13 {
                return Err(Error::Evolution {
                    mode: usize::MAX,
                    reason: format!("Krylov step size underflow (error estimate {err:e})"),
                });
            }
        };

        let mut next = CVector::zeros(dim);
        for (q, y) in basis.iter().zip(coeffs.iter()) {
            next.axpy(*y * beta0, q, Complex64::new(1.0, 0.0));
        }
        v = next;
        remaining -= tau;
        if remaining <= total * 1e-15 {
            break;
        }
        if accepted_first {
            tau *= 2.0;
        }
    }
    Ok(v)
}
