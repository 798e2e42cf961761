use num_complex::Complex64;

use super::{CMatrix, CVector, ZERO};

/// Compressed sparse row matrix, only used for fast matrix-vector products.
#[derive(Debug, Clone)]
pub struct Csr {
    nrows: usize,
    ncols: usize,
    row_ptr: Vec<usize>,
    col_idx: Vec<usize>,
    values: Vec<Complex64>,
}

impl Csr {
    /// Drops exact zeros of a dense matrix.
    pub fn from_dense(m: &CMatrix) -> Self {
        let (nrows, ncols) = m.shape();
        let mut row_ptr = Vec::with_capacity(nrows + 1);
        let mut col_idx = Vec::new();
        let mut values = Vec::new();
        row_ptr.push(0);
        for i in 0..nrows {
            for j in 0..ncols {
                let v = m[(i, j)];
                if v != ZERO {
                    col_idx.push(j);
                    values.push(v);
                }
            }
            row_ptr.push(col_idx.len());
        }
        Self { nrows, ncols, row_ptr, col_idx, values }
    }

    pub fn nnz(&self) -> usize {
        self.values.len()
    }

    pub fn shape(&self) -> (usize, usize) {
        (self.nrows, self.ncols)
    }

    /// `out = alpha * self * x + out`
    pub fn gemv_acc(&self, alpha: Complex64, x: &CVector, out: &mut CVector) {
        assert_eq!(x.len(), self.ncols);
        assert_eq!(out.len(), self.nrows);
        for i in 0..self.nrows {
            let mut acc = ZERO;
            for k in self.row_ptr[i]..self.row_ptr[i + 1] {
                acc += self.values[k] * x[self.col_idx[k]];
            }
            out[i] += alpha * acc;
        }
    }

    pub fn matvec(&self, x: &CVector) -> CVector {
        let mut out = CVector::zeros(self.nrows);
        self.gemv_acc(Complex64::new(1.0, 0.0), x, &mut out);
        out
    }
}
