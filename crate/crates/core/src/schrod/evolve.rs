use num_complex::Complex64;
use rayon::prelude::*;
use rustfft::FftPlanner;

use super::{PGrid, Profile, SchrodSystem};
use crate::error::{Error, Result};
use crate::linalg::{self, krylov_propagate, real, CMatrix, CVector, Csr, I, ONE};

/// Above this system dimension `4N` the automatic choice is Krylov propagation.
pub const DENSE_PROPAGATOR_LIMIT: usize = 512;

/// Per-mode propagator for `exp(-i(ν H1 - H2) t)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Propagator {
    /// Spectral for `4N <= 512`, Krylov above.
    Auto,
    /// Dense Hermitian eigendecomposition.
    Spectral,
    /// Dense Padé scaling-and-squaring exponential.
    ScalingSquaring,
    /// Restarted Lanczos on sparse `H1`, `H2`.
    Krylov,
}

#[derive(Debug, Clone, Copy)]
pub struct EvolveOptions {
    pub propagator: Propagator,
    /// Worker threads for the mode loop, 0 for the rayon default.
    pub threads: usize,
    /// Krylov error target relative to the mode norm.
    pub tol: f64,
    pub krylov_basis: usize,
}

impl Default for EvolveOptions {
    fn default() -> Self {
        Self { propagator: Propagator::Auto, threads: 0, tol: 1e-10, krylov_basis: 30 }
    }
}

/// Grid function `W(t, p_k)` stored as an `N_p x 4N` matrix.
#[derive(Debug, Clone)]
pub struct EvolvedState {
    pub w: CMatrix,
    pub time: f64,
    pub norm0: f64,
    pub norm_t: f64,
}

impl EvolvedState {
    pub fn norm_ratio(&self) -> f64 {
        self.norm_t / self.norm0
    }

    /// `W(t, p_k)` as a column vector of length `4N`.
    pub fn at_node(&self, k: usize) -> CVector {
        self.w.row(k).transpose()
    }
}

/// `W(0, p_k) = ψ(p_k) V_f(0)`.
pub fn init_profile(profile: Profile, grid: &PGrid, vf0: &CVector) -> CMatrix {
    let nodes = grid.nodes();
    CMatrix::from_fn(grid.points, vf0.len(), |k, j| vf0[j] * profile.value(nodes[k]))
}

fn alternate(col: &mut [Complex64]) {
    col.iter_mut().skip(1).step_by(2).for_each(|z| *z = -*z);
}

/// Fourier coefficients `W̃ = Φ⁻¹ W` along the p-axis, column by column.
pub fn to_fourier(w: &CMatrix) -> CMatrix {
    let np = w.nrows();
    let fft = FftPlanner::new().plan_fft_forward(np);
    let mut out = w.clone();
    let scale = real(1.0 / np as f64);
    for mut col in out.column_iter_mut() {
        let s = col.as_mut_slice();
        alternate(s);
        fft.process(s);
        s.iter_mut().for_each(|z| *z *= scale);
    }
    out
}

/// Grid values `W = Φ W̃`.
pub fn from_fourier(wt: &CMatrix) -> CMatrix {
    let np = wt.nrows();
    let fft = FftPlanner::new().plan_fft_inverse(np);
    let mut out = wt.clone();
    for mut col in out.column_iter_mut() {
        let s = col.as_mut_slice();
        fft.process(s);
        alternate(s);
    }
    out
}

/// `Φ` with `Φ_{jl} = exp(i ν_l (p_j + L))`.
pub fn fourier_matrix(grid: &PGrid) -> CMatrix {
    let dp = grid.dp();
    CMatrix::from_fn(grid.points, grid.points, |j, l| (I * (grid.wavenumber(l) * j as f64 * dp)).exp())
}

/// Full generator `D_p ⊗ H1 - I ⊗ H2` acting on `W` flattened as `k * 4N + j`.
pub fn dense_generator(sys: &SchrodSystem) -> CMatrix {
    let phi = fourier_matrix(&sys.grid);
    let np = sys.grid.points;
    let nu = CMatrix::from_diagonal(&CVector::from_fn(np, |l, _| real(sys.grid.wavenumber(l))));
    let dp = &phi * nu * phi.adjoint() * real(1.0 / np as f64);
    linalg::kron(&dp, &sys.h1) - linalg::kron(&CMatrix::identity(np, np), &sys.h2)
}

enum Operators {
    Dense,
    Sparse(Csr, Csr),
}

fn propagate_mode(
    sys: &SchrodSystem,
    ops: &Operators,
    propagator: Propagator,
    opts: &EvolveOptions,
    l: usize,
    w0: CVector,
    times: &[f64],
) -> Result<Vec<CVector>> {
    let nu = sys.grid.wavenumber(l);
    let mut out = Vec::with_capacity(times.len());
    if w0.iter().all(|z| *z == Complex64::new(0.0, 0.0)) {
        out.resize(times.len(), w0);
        return Ok(out);
    }
    match (propagator, ops) {
        (Propagator::Spectral, _) => {
            let g = &sys.h1 * real(nu) - &sys.h2;
            let eig = g.symmetric_eigen();
            let y = eig.eigenvectors.adjoint() * &w0;
            for &t in times {
                let phased = CVector::from_fn(y.len(), |i, _| y[i] * (-I * (eig.eigenvalues[i] * t)).exp());
                out.push(&eig.eigenvectors * phased);
            }
        }
        (Propagator::ScalingSquaring, _) => {
            let g = &sys.h1 * real(nu) - &sys.h2;
            let mut w = w0;
            let mut t0 = 0.0;
            for &t in times {
                if t > t0 {
                    w = (&g * (-I * (t - t0))).exp() * w;
                }
                t0 = t;
                out.push(w.clone());
            }
        }
        (Propagator::Krylov, Operators::Sparse(h1, h2)) => {
            let apply = |x: &CVector| {
                let mut y = h1.matvec(x) * real(nu);
                h2.gemv_acc(-ONE, x, &mut y);
                y
            };
            let mut w = w0;
            let mut t0 = 0.0;
            for &t in times {
                if t > t0 {
                    w = krylov_propagate(apply, &w, t - t0, opts.krylov_basis, opts.tol).map_err(|e| match e {
                        Error::Evolution { reason, .. } => Error::Evolution { mode: l, reason },
                        other => other,
                    })?;
                }
                t0 = t;
                out.push(w.clone());
            }
        }
        _ => unreachable!("Krylov propagation needs sparse operators"),
    }
    if out.iter().any(|v| v.iter().any(|z| !z.is_finite())) {
        return Err(Error::Evolution { mode: l, reason: "non-finite state".into() });
    }
    Ok(out)
}

/// Evolves `W0` to `sys.t_final`.
pub fn evolve(sys: &SchrodSystem, w0: &CMatrix, opts: EvolveOptions) -> Result<EvolvedState> {
    evolve_at(sys, w0, &[sys.t_final], opts).map(|mut s| s.pop().expect("one time"))
}

/// Evolves `W0` and returns the state at each of the sorted `times`.
///
/// Every mode is propagated independently, so the result does not depend on
/// the thread count.
pub fn evolve_at(sys: &SchrodSystem, w0: &CMatrix, times: &[f64], opts: EvolveOptions) -> Result<Vec<EvolvedState>> {
    let np = sys.grid.points;
    let dim = sys.h1.nrows();
    if w0.shape() != (np, dim) {
        return Err(Error::Shape(format!("W0 is {:?}, expected ({np}, {dim})", w0.shape())));
    }
    if times.iter().any(|t| !(t.is_finite() && *t >= 0.0)) || times.windows(2).any(|w| w[1] < w[0]) {
        return Err(Error::Config("evolution times must be finite, non-negative and sorted".into()));
    }
    let propagator = match opts.propagator {
        Propagator::Auto if dim <= DENSE_PROPAGATOR_LIMIT => Propagator::Spectral,
        Propagator::Auto => Propagator::Krylov,
        p => p,
    };
    let ops = if propagator == Propagator::Krylov {
        Operators::Sparse(Csr::from_dense(&sys.h1), Csr::from_dense(&sys.h2))
    } else {
        Operators::Dense
    };
    let norm0 = w0.norm();
    let wt0 = to_fourier(w0);

    let run = || -> Vec<Result<Vec<CVector>>> {
        (0..np)
            .into_par_iter()
            .map(|l| propagate_mode(sys, &ops, propagator, &opts, l, wt0.row(l).transpose(), times))
            .collect()
    };
    let per_mode = if opts.threads == 0 {
        run()
    } else {
        rayon::ThreadPoolBuilder::new()
            .num_threads(opts.threads)
            .build()
            .map_err(|e| Error::Config(format!("cannot start {} threads: {e}", opts.threads)))?
            .install(run)
    };
    let per_mode: Vec<Vec<CVector>> = per_mode.into_iter().collect::<Result<_>>()?;

    let mut states = Vec::with_capacity(times.len());
    for (ti, &t) in times.iter().enumerate() {
        let w = if t == 0.0 {
            w0.clone()
        } else {
            let mut wt = CMatrix::zeros(np, dim);
            for (l, series) in per_mode.iter().enumerate() {
                wt.row_mut(l).copy_from(&series[ti].transpose());
            }
            from_fourier(&wt)
        };
        let norm_t = w.norm();
        states.push(EvolvedState { w, time: t, norm0, norm_t });
    }
    Ok(states)
}
