//! Damped dynamical system whose steady state solves `A x = b`.
//!
//! The second-order flow `v'' + γ v' = -A†A v + A†b` is written in first-order
//! form `V' = M V + F` with
//!
//! ```text
//!   V = [v; w],   M = [[0, -A†], [A, -γI]],   F = [0; -b],   V(0) = 0.
//! ```
//!
//! With critical damping `γ = 2σ_min(A)` the slowest mode decays like
//! `(1 + σ_min t) exp(-σ_min t)`.

use crate::error::{Error, Result};
use crate::linalg::{self, hermitian_extremes, real, CMatrix, CVector, LanczosOptions};

/// Above this dimension singular values come from Lanczos iterations.
pub const DENSE_SVD_LIMIT: usize = 1024;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SingularValues {
    pub min: f64,
    pub max: f64,
}

impl SingularValues {
    pub fn condition_number(&self) -> f64 {
        self.max / self.min
    }
}

pub fn extreme_singular_values(a: &CMatrix) -> Result<SingularValues> {
    extreme_singular_values_with(a, DENSE_SVD_LIMIT)
}

/// Dense SVD up to `dense_limit`, otherwise Lanczos on `A†A` for the largest
/// value and on `(A†A)⁻¹` (two LU solves per step) for the smallest.
pub fn extreme_singular_values_with(a: &CMatrix, dense_limit: usize) -> Result<SingularValues> {
    let n = a.nrows();
    if n == 0 || n != a.ncols() {
        return Err(Error::Shape(format!("expected a non-empty square matrix, got {}x{}", n, a.ncols())));
    }
    if n <= dense_limit {
        let s = a.clone().singular_values();
        let max = s.iter().copied().fold(0.0, f64::max);
        let min = s.iter().copied().fold(f64::INFINITY, f64::min);
        return Ok(SingularValues { min, max });
    }

    let opts = LanczosOptions { max_basis: 600, tol: 1e-10 };
    let adj = a.adjoint();
    let (_, hi) = hermitian_extremes(|x| &adj * (a * x), n, opts)?;
    let lu = a.clone().lu();
    let lu_adj = adj.clone().lu();
    if !lu.is_invertible() {
        return Ok(SingularValues { min: 0.0, max: hi.sqrt() });
    }
    let (_, inv_hi) = hermitian_extremes(
        |x| {
            let y = lu_adj.solve(x).expect("invertible");
            lu.solve(&y).expect("invertible")
        },
        n,
        opts,
    )?;
    Ok(SingularValues { min: 1.0 / inv_hi.sqrt(), max: hi.sqrt() })
}

/// Stopping time `log(1/ε)/σ_min`, rounded up to three significant digits.
pub fn stopping_time(sigma_min: f64, epsilon: f64) -> f64 {
    ceil_to_grid((1.0 / epsilon).ln() / sigma_min)
}

fn ceil_to_grid(t: f64) -> f64 {
    if !(t > 0.0 && t.is_finite()) {
        return t;
    }
    let e = t.log10().floor() as i32 - 2;
    let q = if e < 0 { t * 10f64.powi(-e) } else { t / 10f64.powi(e) };
    let snapped = if (q - q.round()).abs() <= 1e-12 * q { q.round() } else { q.ceil() };
    if e < 0 {
        snapped / 10f64.powi(-e)
    } else {
        snapped * 10f64.powi(e)
    }
}

#[derive(Debug, Clone)]
pub struct DampedSystem {
    /// `A` (or `PA`).
    pub operator: CMatrix,
    /// `b` (or `Pb`).
    pub rhs: CVector,
    /// `M`, dimension `2N`.
    pub generator: CMatrix,
    /// `F = [0; -b]`.
    pub forcing: CVector,
    pub gamma: f64,
    pub singular_values: SingularValues,
    pub t_final: f64,
    pub epsilon: f64,
}

/// Builds the critically damped system with the automatic stopping time.
pub fn build_damped(a: &CMatrix, b: &CVector, epsilon: f64) -> Result<DampedSystem> {
    let sv = extreme_singular_values(a)?;
    build_damped_with(a, b, sv, epsilon, None)
}

/// As [`build_damped`] with known singular values and an optional explicit final time.
pub fn build_damped_with(
    a: &CMatrix,
    b: &CVector,
    singular_values: SingularValues,
    epsilon: f64,
    t_final: Option<f64>,
) -> Result<DampedSystem> {
    let n = a.nrows();
    if a.ncols() != n || b.len() != n {
        return Err(Error::Shape(format!("operator {}x{} with rhs {}", n, a.ncols(), b.len())));
    }
    if !(epsilon > 0.0 && epsilon < 1.0) {
        return Err(Error::Config(format!("epsilon must lie in (0, 1), got {epsilon}")));
    }
    if singular_values.min.is_nan() || singular_values.min <= 0.0 {
        return Err(Error::SingularOperator(singular_values.min));
    }
    let t_final = match t_final {
        Some(t) if t > 0.0 && t.is_finite() => t,
        Some(t) => return Err(Error::Config(format!("final time must be positive, got {t}"))),
        None => stopping_time(singular_values.min, epsilon),
    };
    let gamma = 2.0 * singular_values.min;
    let mut sys = DampedSystem {
        operator: a.clone(),
        rhs: b.clone(),
        generator: CMatrix::zeros(2 * n, 2 * n),
        forcing: CVector::zeros(2 * n),
        gamma,
        singular_values,
        t_final,
        epsilon,
    };
    sys.assemble();
    Ok(sys)
}

impl DampedSystem {
    fn assemble(&mut self) {
        let n = self.unknowns();
        let mut m = CMatrix::zeros(2 * n, 2 * n);
        m.view_mut((0, n), (n, n)).copy_from(&(-self.operator.adjoint()));
        m.view_mut((n, 0), (n, n)).copy_from(&self.operator);
        for i in n..2 * n {
            m[(i, i)] = real(-self.gamma);
        }
        let mut f = CVector::zeros(2 * n);
        f.rows_mut(n, n).copy_from(&(-&self.rhs));
        self.generator = m;
        self.forcing = f;
    }

    /// Same system with a different damping coefficient.
    pub fn with_damping(mut self, gamma: f64) -> Self {
        self.gamma = gamma;
        self.assemble();
        self
    }

    pub fn with_final_time(mut self, t_final: f64) -> Self {
        self.t_final = t_final;
        self
    }

    /// `N`, the size of the original system.
    pub fn unknowns(&self) -> usize {
        self.operator.nrows()
    }

    pub fn dim(&self) -> usize {
        2 * self.unknowns()
    }

    /// `(M + M†)/2 = diag(0, -γI)`
    pub fn hermitian_part(&self) -> CMatrix {
        (&self.generator + self.generator.adjoint()) * real(0.5)
    }

    /// `(M - M†)/2 = [[0, -A†], [A, 0]]`
    pub fn anti_hermitian_part(&self) -> CMatrix {
        (&self.generator - self.generator.adjoint()) * real(0.5)
    }

    /// Dense solve of `A x = b`.
    pub fn steady_state(&self) -> Result<CVector> {
        linalg::dense_solve(&self.operator, &self.rhs)
    }

    /// Integrates the system from zero to `t_end`.
    pub fn integrate_reference(&self, t_end: f64, control: StepControl) -> Result<CVector> {
        integrate_reference(self, t_end, control)
    }
}

/// Step-size control for the reference integrator.
#[derive(Debug, Clone, Copy)]
pub struct StepControl {
    /// Tolerance on the embedded full-step vs. two-half-steps comparison.
    pub tol: f64,
    /// Upper bound on a single exponential step.
    pub max_step: Option<f64>,
    pub min_step: f64,
}

impl Default for StepControl {
    fn default() -> Self {
        Self { tol: 1e-8, max_step: None, min_step: 1e-10 }
    }
}

/// Exponential integrator for `y' = G y + c`.
///
/// One step of size `τ` is the exact affine map `y ↦ E y + d` with
/// `E = exp(τG)` and `d = τ φ₁(τG) c`, both read off the exponential of the
/// augmented matrix `[[τG, τc], [0, 0]]`. Each step is checked against two
/// half steps and refined when they disagree.
#[derive(Debug, Clone, Copy)]
pub struct AffineFlow<'a> {
    pub generator: &'a CMatrix,
    pub forcing: &'a CVector,
}

impl<'a> AffineFlow<'a> {
    pub fn new(generator: &'a CMatrix, forcing: &'a CVector) -> Self {
        assert_eq!(generator.nrows(), forcing.len());
        Self { generator, forcing }
    }

    fn step_map(&self, tau: f64) -> (CMatrix, CVector) {
        let n = self.forcing.len();
        let mut aug = CMatrix::zeros(n + 1, n + 1);
        aug.view_mut((0, 0), (n, n)).copy_from(&(self.generator * real(tau)));
        aug.view_mut((0, n), (n, 1)).copy_from(&(self.forcing * real(tau)));
        let e = aug.exp();
        (e.view((0, 0), (n, n)).into_owned(), e.view((0, n), (n, 1)).column(0).into_owned())
    }

    fn checked_step_map(&self, interval: f64, t0: f64, control: &StepControl) -> Result<(CMatrix, CVector, usize)> {
        let mut substeps = match control.max_step {
            Some(h) if h > 0.0 => (interval / h).ceil().max(1.0) as usize,
            _ => 1,
        };
        loop {
            let tau = interval / substeps as f64;
            if tau < control.min_step {
                return Err(Error::Stiffness { time: t0, step: tau });
            }
            let (e, d) = self.step_map(tau);
            let (eh, dh) = self.step_map(0.5 * tau);
            let e2 = &eh * &eh;
            let d2 = &eh * &dh + &dh;
            let scale = 1.0 + linalg::max_abs(&e).max(linalg::inf_norm(&d));
            let err = linalg::max_abs(&(&e - e2)).max(linalg::inf_norm(&(&d - d2)));
            if err.is_finite() && err <= control.tol * scale {
                return Ok((e, d, substeps));
            }
            substeps *= 2;
        }
    }

    /// States at each of the (sorted, non-negative) `times`, starting from `y0` at 0.
    pub fn trajectory(&self, y0: &CVector, times: &[f64], control: StepControl) -> Result<Vec<CVector>> {
        let mut out = Vec::with_capacity(times.len());
        let mut y = y0.clone();
        let mut t = 0.0;
        for &target in times {
            if target < t {
                return Err(Error::Config(format!("checkpoint times must be sorted, {target} after {t}")));
            }
            let interval = target - t;
            if interval > 0.0 {
                let (e, d, substeps) = self.checked_step_map(interval, t, &control)?;
                for _ in 0..substeps {
                    y = &e * &y + &d;
                }
            }
            t = target;
            out.push(y.clone());
        }
        Ok(out)
    }
}

/// `V(t_end)` for the damped system, from `V(0) = 0`.
pub fn integrate_reference(sys: &DampedSystem, t_end: f64, control: StepControl) -> Result<CVector> {
    reference_trajectory(sys, &[t_end], control).map(|mut v| v.pop().expect("one checkpoint"))
}

pub fn reference_trajectory(sys: &DampedSystem, times: &[f64], control: StepControl) -> Result<Vec<CVector>> {
    let flow = AffineFlow::new(&sys.generator, &sys.forcing);
    flow.trajectory(&CVector::zeros(sys.dim()), times, control)
}

/// Gradient flow `x' = -A†A x + A†b` from zero, evaluated at `t_end`.
pub fn gradient_flow_reference(a: &CMatrix, b: &CVector, t_end: f64, control: StepControl) -> Result<CVector> {
    gradient_flow_trajectory(a, b, &[t_end], control).map(|mut v| v.pop().expect("one checkpoint"))
}

pub fn gradient_flow_trajectory(a: &CMatrix, b: &CVector, times: &[f64], control: StepControl) -> Result<Vec<CVector>> {
    let adj = a.adjoint();
    let g = -(&adj * a);
    let c = &adj * b;
    AffineFlow::new(&g, &c).trajectory(&CVector::zeros(b.len()), times, control)
}

/// Real diagonal helper, mostly for tests and examples.
pub fn diagonal(values: &[f64]) -> CMatrix {
    CMatrix::from_diagonal(&CVector::from_iterator(values.len(), values.iter().map(|&v| real(v))))
}
