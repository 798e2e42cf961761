use num_complex::Complex64;

use super::{CMatrix, CVector, ZERO};

/// Complex tridiagonal matrix stored by diagonals.
///
/// `sub[i]` is entry `(i + 1, i)`, `sup[i]` is entry `(i, i + 1)`.
#[derive(Debug, Clone, PartialEq)]
pub struct Tridiagonal {
    pub sub: Vec<Complex64>,
    pub diag: Vec<Complex64>,
    pub sup: Vec<Complex64>,
}

impl Tridiagonal {
    pub fn new(sub: Vec<Complex64>, diag: Vec<Complex64>, sup: Vec<Complex64>) -> Self {
        let n = diag.len();
        assert!(n > 0, "empty tridiagonal matrix");
        assert_eq!(sub.len(), n - 1, "sub-diagonal length");
        assert_eq!(sup.len(), n - 1, "super-diagonal length");
        Self { sub, diag, sup }
    }

    pub fn dim(&self) -> usize {
        self.diag.len()
    }

    pub fn matvec(&self, x: &CVector) -> CVector {
        let n = self.dim();
        assert_eq!(x.len(), n);
        CVector::from_fn(n, |i, _| {
            let mut acc = self.diag[i] * x[i];
            if i > 0 {
                acc += self.sub[i - 1] * x[i - 1];
            }
            if i + 1 < n {
                acc += self.sup[i] * x[i + 1];
            }
            acc
        })
    }

    pub fn to_dense(&self) -> CMatrix {
        let n = self.dim();
        let mut m = CMatrix::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = self.diag[i];
            if i + 1 < n {
                m[(i + 1, i)] = self.sub[i];
                m[(i, i + 1)] = self.sup[i];
            }
        }
        m
    }

    /// Adds `shift` to every diagonal entry.
    pub fn shifted(&self, shift: Complex64) -> Self {
        let mut out = self.clone();
        out.diag.iter_mut().for_each(|d| *d += shift);
        out
    }

    /// LU factorization with partial pivoting (the LAPACK `gttrf` scheme).
    ///
    /// Returns `None` if a zero pivot is met.
    pub fn factorize(&self) -> Option<TridiagonalLu> {
        let n = self.dim();
        let mut dl = self.sub.clone();
        let mut d = self.diag.clone();
        let mut du = self.sup.clone();
        let mut du2 = vec![ZERO; n.saturating_sub(2)];
        let mut swapped = vec![false; n.saturating_sub(1)];

        for i in 0..n.saturating_sub(1) {
            if d[i].norm() >= dl[i].norm() {
                if d[i] != ZERO {
                    let fact = dl[i] / d[i];
                    dl[i] = fact;
                    d[i + 1] -= fact * du[i];
                }
            } else {
                let fact = d[i] / dl[i];
                d[i] = dl[i];
                dl[i] = fact;
                let temp = du[i];
                du[i] = d[i + 1];
                d[i + 1] = temp - fact * d[i + 1];
                if i + 2 < n {
                    du2[i] = du[i + 1];
                    du[i + 1] = -fact * du[i + 1];
                }
                swapped[i] = true;
            }
        }
        if d.iter().any(|p| *p == ZERO || !p.is_finite()) {
            return None;
        }
        Some(TridiagonalLu { dl, d, du, du2, swapped })
    }
}

/// Factors produced by [`Tridiagonal::factorize`].
#[derive(Debug, Clone)]
pub struct TridiagonalLu {
    dl: Vec<Complex64>,
    d: Vec<Complex64>,
    du: Vec<Complex64>,
    du2: Vec<Complex64>,
    swapped: Vec<bool>,
}

impl TridiagonalLu {
    pub fn dim(&self) -> usize {
        self.d.len()
    }

    pub fn solve_in_place(&self, b: &mut [Complex64]) {
        let n = self.dim();
        assert_eq!(b.len(), n);
        for i in 0..n.saturating_sub(1) {
            if self.swapped[i] {
                let temp = b[i];
                b[i] = b[i + 1];
                b[i + 1] = temp - self.dl[i] * b[i];
            } else {
                b[i + 1] -= self.dl[i] * b[i];
            }
        }
        b[n - 1] /= self.d[n - 1];
        if n > 1 {
            b[n - 2] = (b[n - 2] - self.du[n - 2] * b[n - 1]) / self.d[n - 2];
        }
        for i in (0..n.saturating_sub(2)).rev() {
            b[i] = (b[i] - self.du[i] * b[i + 1] - self.du2[i] * b[i + 2]) / self.d[i];
        }
    }

    pub fn solve(&self, b: &CVector) -> CVector {
        let mut x = b.clone();
        self.solve_in_place(x.as_mut_slice());
        x
    }

    /// Solves against every column of `b`.
    pub fn solve_matrix(&self, b: &CMatrix) -> CMatrix {
        let mut x = b.clone();
        for mut col in x.column_iter_mut() {
            self.solve_in_place(col.as_mut_slice());
        }
        x
    }
}
