//! Schrödingerization of the damped system.
//!
//! The inhomogeneous flow `V' = MV + F` is made homogeneous by appending the
//! constant block `r = T F`, giving `V_f' = M_f V_f` with
//! `M_f = [[M, I/T], [0, 0]] = H1 + i H2`. The warped phase transform
//! `W(t, p) = e^{-p} V_f(t)` for `p > 0` turns this into the transport-type
//! system `∂_t W = -H1 ∂_p W + i H2 W`, which is unitary after a Fourier
//! transform in `p`: each mode evolves under `exp(-i(ν H1 - H2) t)`.

mod evolve;
mod grid;
mod profile;
mod recover;

pub use evolve::{
    dense_generator, evolve, evolve_at, fourier_matrix, from_fourier, init_profile, to_fourier, EvolveOptions,
    EvolvedState, Propagator, DENSE_PROPAGATOR_LIMIT,
};
pub use grid::{choose_p_domain, PDomain, PGrid};
pub use profile::Profile;
pub use recover::{recover, recovery_node, Recovery, RecoveryStrategy};

use crate::dds::DampedSystem;
use crate::error::{Error, Result};
use crate::linalg::{self, hermitian_extremes, real, CMatrix, CVector, LanczosOptions, I};

/// Dense eigensolver up to this dimension, Lanczos above.
const DENSE_EIG_LIMIT: usize = 1024;

/// `M_f = [[M, I/T], [0, 0]]` and `V_f(0) = [0; T F]`.
pub fn homogenize(sys: &DampedSystem) -> Result<(CMatrix, CVector)> {
    let t = sys.t_final;
    if !(t > 0.0 && t.is_finite()) {
        return Err(Error::Config(format!("final time must be positive, got {t}")));
    }
    let d = sys.dim();
    if sys.generator.shape() != (d, d) || sys.forcing.len() != d {
        return Err(Error::Shape("damped system blocks are inconsistent".into()));
    }
    let mut mf = CMatrix::zeros(2 * d, 2 * d);
    mf.view_mut((0, 0), (d, d)).copy_from(&sys.generator);
    for i in 0..d {
        mf[(i, d + i)] = real(1.0 / t);
    }
    let mut vf0 = CVector::zeros(2 * d);
    vf0.rows_mut(d, d).copy_from(&(&sys.forcing * real(t)));
    Ok((mf, vf0))
}

/// `H1 = (M_f + M_f†)/2`, `H2 = (M_f - M_f†)/(2i)`.
pub fn hermitian_split(mf: &CMatrix) -> (CMatrix, CMatrix) {
    let adj = mf.adjoint();
    let h1 = (mf + &adj) * real(0.5);
    let h2 = (mf - &adj) * (-I * 0.5);
    (h1, h2)
}

/// Smallest and largest eigenvalue of a Hermitian matrix.
pub fn hermitian_bounds(m: &CMatrix) -> Result<(f64, f64)> {
    let n = m.nrows();
    if n <= DENSE_EIG_LIMIT {
        let ev = linalg::hermitian_eigenvalues(m);
        Ok((ev[0], ev[n - 1]))
    } else {
        let csr = linalg::Csr::from_dense(m);
        hermitian_extremes(|x| csr.matvec(x), n, LanczosOptions { max_basis: 600, tol: 1e-13 })
    }
}

#[derive(Debug, Clone, Copy)]
pub struct SchrodOptions {
    pub profile: Profile,
    pub domain: PDomain,
    /// `N_p = 2^m`.
    pub m: u32,
    /// Truncation tolerance for the p-domain.
    pub epsilon: f64,
    pub strict: bool,
}

impl Default for SchrodOptions {
    fn default() -> Self {
        Self { profile: Profile::Cubic, domain: PDomain::default(), m: 8, epsilon: 1e-3, strict: false }
    }
}

/// Homogenized, split and discretized system ready for evolution.
#[derive(Debug, Clone)]
pub struct SchrodSystem {
    pub h1: CMatrix,
    pub h2: CMatrix,
    pub t_final: f64,
    pub grid: PGrid,
    pub profile: Profile,
    /// `max(λ_max(H1) T, 0)`.
    pub p_diamond: f64,
    pub vf0: CVector,
    /// `N`, the size of the original linear system.
    pub unknowns: usize,
    pub h1_extremes: (f64, f64),
    pub warnings: Vec<String>,
}

pub fn build_schrod(sys: &DampedSystem, opts: &SchrodOptions) -> Result<SchrodSystem> {
    let (mf, vf0) = homogenize(sys)?;
    let (h1, h2) = hermitian_split(&mf);
    let h1_extremes = hermitian_bounds(&h1)?;
    let (grid, warnings) = choose_p_domain(h1_extremes, sys.t_final, opts.epsilon, opts.domain, opts.m, opts.strict)?;
    let p_diamond = (h1_extremes.1 * sys.t_final).max(0.0);
    recovery_node(&grid, p_diamond)?;
    Ok(SchrodSystem {
        h1,
        h2,
        t_final: sys.t_final,
        grid,
        profile: opts.profile,
        p_diamond,
        vf0,
        unknowns: sys.unknowns(),
        h1_extremes,
        warnings,
    })
}

impl SchrodSystem {
    /// `4N`.
    pub fn dim(&self) -> usize {
        self.h1.nrows()
    }

    pub fn initial_state(&self) -> CMatrix {
        init_profile(self.profile, &self.grid, &self.vf0)
    }
}

#[cfg(test)]
mod tests;
