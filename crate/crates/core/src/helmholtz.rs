//! Dispersion-corrected finite differences for the 1D Helmholtz equation
//!
//! ```text
//!   -u'' - k² u = f   on (0, 1),   u(0) = g,   u'(1) - i k u(1) = 0
//! ```
//!
//! discretized on the uniform grid `x_j = j h`. The three-point stencil uses the
//! shifted wavenumber `k̂ = (2/h) sin(kh/2)` instead of `k`, which makes discrete
//! plane waves `exp(i k x_j)` exact solutions of the homogeneous interior
//! equations. All rows are multiplied by `h²` so that `|A|_max = O(1)`.
//!
//! The Dirichlet node `x_0` is eliminated. With a Robin right end the unknowns
//! are `u_1..u_N` (`N` = number of cells), the last row coming from the
//! ghost-point closure `u_{N+1} = u_{N-1} + 2ikh u_N`.

use std::fmt;
use std::sync::Arc;

use num_complex::Complex64;

use crate::dds::{extreme_singular_values, SingularValues};
use crate::error::{Error, Result};
use crate::linalg::{real, CMatrix, CVector, Tridiagonal, I, ZERO};

/// Shifted wavenumber `k̂ = sqrt((2/h²)(1 - cos(kh)))`.
///
/// Evaluated as `(2/h) sin(kh/2)`, which is the same quantity without the
/// cancellation in `1 - cos(kh)` for small `kh`.
pub fn shifted_wavenumber(k: f64, h: f64) -> Result<f64> {
    let kh = k * h;
    if !(kh > 0.0 && kh < std::f64::consts::PI) || !h.is_finite() {
        return Err(Error::Domain(format!("shifted wavenumber needs 0 < kh < pi, got kh = {kh}")));
    }
    Ok(2.0 / h * (0.5 * kh).sin())
}

/// Applies the `h²`-scaled interior stencil `-u_{j-1} + (2 - k̂²h²) u_j - u_{j+1}`
/// at every interior index of `u`.
pub fn apply_interior_stencil(k_hat: f64, h: f64, u: &[Complex64]) -> Vec<Complex64> {
    let centre = real(2.0 - k_hat * k_hat * h * h);
    u.windows(3).map(|w| -w[0] + centre * w[1] - w[2]).collect()
}

/// Closed-form solution for `f = -sin(kx)`, `u(0) = 0` and the Robin end.
///
/// `u(x) = -x cos(kx)/(2k) + sin(kx) (1 + e^{2ik} - 2ik)/(4k²)`
pub fn exact_solution(k: f64, x: f64) -> Complex64 {
    let c = (real(1.0) + (I * 2.0 * k).exp() - I * 2.0 * k) / (4.0 * k * k);
    real(-x * (k * x).cos() / (2.0 * k)) + c * (k * x).sin()
}

/// Source term `f(x)`.
#[derive(Clone)]
pub enum Source {
    Zero,
    /// `f(x) = -sin(kx)`, the case with a closed-form solution.
    NegativeSine,
    Custom(Arc<dyn Fn(f64) -> Complex64 + Send + Sync>),
}

impl Source {
    pub fn eval(&self, k: f64, x: f64) -> Complex64 {
        match self {
            Source::Zero => ZERO,
            Source::NegativeSine => real(-(k * x).sin()),
            Source::Custom(f) => f(x),
        }
    }
}

impl fmt::Debug for Source {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Source::Zero => f.write_str("Zero"),
            Source::NegativeSine => f.write_str("NegativeSine"),
            Source::Custom(_) => f.write_str("Custom(..)"),
        }
    }
}

/// Condition imposed at `x = 1`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum RightBoundary {
    /// First-order radiation condition `u'(1) - i k u(1) = 0`.
    Robin,
    Dirichlet(Complex64),
}

#[derive(Debug, Clone)]
pub struct HelmholtzProblem {
    k: f64,
    cells: usize,
    left_value: Complex64,
    right: RightBoundary,
    source: Source,
}

impl HelmholtzProblem {
    /// The standard test problem on `h = 2^-n`: `f = -sin(kx)`, `u(0) = 0`, Robin at 1.
    pub fn new(k: f64, mesh_exponent: u32) -> Result<Self> {
        if mesh_exponent == 0 || mesh_exponent > 24 {
            return Err(Error::Domain(format!("mesh exponent {mesh_exponent} out of range 1..=24")));
        }
        Self::with_cells(k, 1usize << mesh_exponent)
    }

    pub fn with_cells(k: f64, cells: usize) -> Result<Self> {
        let p = Self { k, cells, left_value: ZERO, right: RightBoundary::Robin, source: Source::NegativeSine };
        p.validate()?;
        Ok(p)
    }

    pub fn with_source(mut self, source: Source) -> Self {
        self.source = source;
        self
    }

    pub fn with_left_value(mut self, value: Complex64) -> Self {
        self.left_value = value;
        self
    }

    pub fn with_right_boundary(mut self, right: RightBoundary) -> Self {
        self.right = right;
        self
    }

    fn validate(&self) -> Result<()> {
        if !(self.k > 0.0 && self.k.is_finite()) {
            return Err(Error::Domain(format!("wavenumber must be positive, got {}", self.k)));
        }
        if self.cells < 2 {
            return Err(Error::Domain(format!("need at least 2 cells, got {}", self.cells)));
        }
        // kh < 1 also rules out kh in pi*N
        if self.kh() >= 1.0 {
            return Err(Error::Domain(format!("kh = {} violates kh < 1", self.kh())));
        }
        Ok(())
    }

    pub fn k(&self) -> f64 {
        self.k
    }

    pub fn cells(&self) -> usize {
        self.cells
    }

    pub fn h(&self) -> f64 {
        1.0 / self.cells as f64
    }

    pub fn kh(&self) -> f64 {
        self.k * self.h()
    }

    pub fn right(&self) -> RightBoundary {
        self.right
    }

    pub fn source(&self) -> &Source {
        &self.source
    }

    /// Number of unknowns after eliminating the Dirichlet node(s).
    pub fn unknowns(&self) -> usize {
        match self.right {
            RightBoundary::Robin => self.cells,
            RightBoundary::Dirichlet(_) => self.cells - 1,
        }
    }

    /// Coordinates of the unknowns.
    pub fn nodes(&self) -> Vec<f64> {
        let h = self.h();
        (1..=self.unknowns()).map(|j| j as f64 * h).collect()
    }

    /// `h²`-scaled operator with diagonal shift `-shift` (interior rows
    /// `[-1, 2 - shift, -1]`) and this problem's boundary rows.
    fn assemble(&self, shift: Complex64) -> Tridiagonal {
        let n = self.unknowns();
        let mut sub = vec![real(-1.0); n - 1];
        let sup = vec![real(-1.0); n - 1];
        let mut diag = vec![real(2.0) - shift; n];
        if self.right == RightBoundary::Robin {
            sub[n - 2] = real(-2.0);
            diag[n - 1] -= I * (2.0 * self.kh());
        }
        Tridiagonal::new(sub, diag, sup)
    }

    /// `h²(-Δ_h)` with the same boundary rows as the Helmholtz matrix.
    pub fn scaled_laplacian(&self) -> Tridiagonal {
        self.assemble(ZERO)
    }
}

/// Assembled linear system `A x = b`.
#[derive(Debug, Clone)]
pub struct DiscreteHelmholtz {
    pub problem: HelmholtzProblem,
    pub matrix: Tridiagonal,
    pub rhs: CVector,
    pub h: f64,
    pub k_hat: f64,
    pub nodes: Vec<f64>,
    pub singular_values: SingularValues,
}

impl DiscreteHelmholtz {
    pub fn dim(&self) -> usize {
        self.rhs.len()
    }

    pub fn dense(&self) -> CMatrix {
        self.matrix.to_dense()
    }

    pub fn condition_number(&self) -> f64 {
        self.singular_values.condition_number()
    }

    /// Direct tridiagonal solve.
    pub fn solve(&self) -> Result<CVector> {
        let lu =
            self.matrix.factorize().ok_or(Error::SingularSystem { sigma_min: 0.0, norm: self.singular_values.max })?;
        Ok(lu.solve(&self.rhs))
    }

    /// Closed-form solution sampled at the unknowns (only meaningful for the
    /// standard problem).
    pub fn exact_at_nodes(&self) -> CVector {
        let k = self.problem.k();
        CVector::from_iterator(self.nodes.len(), self.nodes.iter().map(|&x| exact_solution(k, x)))
    }
}

pub fn build_system(problem: &HelmholtzProblem) -> Result<DiscreteHelmholtz> {
    problem.validate()?;
    let h = problem.h();
    let k = problem.k();
    let k_hat = shifted_wavenumber(k, h)?;
    let matrix = problem.assemble(real(k_hat * k_hat * h * h));
    let nodes = problem.nodes();
    let n = nodes.len();

    let mut rhs = CVector::from_iterator(n, nodes.iter().map(|&x| problem.source.eval(k, x) * (h * h)));
    rhs[0] += problem.left_value;
    if let RightBoundary::Dirichlet(g) = problem.right {
        rhs[n - 1] += g;
    }

    let singular_values = extreme_singular_values(&matrix.to_dense())?;
    if singular_values.min < 1e-14 * singular_values.max {
        return Err(Error::SingularSystem { sigma_min: singular_values.min, norm: singular_values.max });
    }
    Ok(DiscreteHelmholtz { problem: problem.clone(), matrix, rhs, h, k_hat, nodes, singular_values })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum PreconditionMode {
    None,
    /// `P⁻¹ = -Δ_h + k̂² I`
    RealShift,
    /// `P⁻¹ = -Δ_h + i k̂² I`
    ImaginaryShift,
}

impl PreconditionMode {
    /// Diagonal shift of `h² P⁻¹` relative to `h²(-Δ_h)`.
    fn scaled_shift(self, k_hat: f64, h: f64) -> Option<Complex64> {
        let s = k_hat * k_hat * h * h;
        match self {
            PreconditionMode::None => None,
            PreconditionMode::RealShift => Some(real(s)),
            PreconditionMode::ImaginaryShift => Some(I * s),
        }
    }
}

impl PreconditionMode {
    pub fn name(self) -> &'static str {
        match self {
            PreconditionMode::None => "none",
            PreconditionMode::RealShift => "real",
            PreconditionMode::ImaginaryShift => "imag",
        }
    }
}

impl std::str::FromStr for PreconditionMode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "none" => Ok(PreconditionMode::None),
            "real" | "real_shift" => Ok(PreconditionMode::RealShift),
            "imag" | "imaginary_shift" => Ok(PreconditionMode::ImaginaryShift),
            other => Err(Error::Config(format!("unknown preconditioner '{other}' (expected none, real or imag)"))),
        }
    }
}

/// `P A x = P b`, with `P A` held densely.
#[derive(Debug, Clone)]
pub struct PreconditionedSystem {
    pub mode: PreconditionMode,
    pub operator: CMatrix,
    pub rhs: CVector,
    pub singular_values: SingularValues,
}

impl PreconditionedSystem {
    pub fn kappa_estimate(&self) -> f64 {
        self.singular_values.condition_number()
    }
}

/// Applies the shifted-Laplacian preconditioner by tridiagonal solves.
///
/// With mode `None` the original system is returned unchanged (densified).
pub fn build_preconditioned(sys: &DiscreteHelmholtz, mode: PreconditionMode) -> Result<PreconditionedSystem> {
    let a = sys.dense();
    let Some(shift) = mode.scaled_shift(sys.k_hat, sys.h) else {
        return Ok(PreconditionedSystem {
            mode,
            operator: a,
            rhs: sys.rhs.clone(),
            singular_values: sys.singular_values,
        });
    };
    let inverse = sys.problem.scaled_laplacian().shifted(shift);
    let lu =
        inverse.factorize().ok_or_else(|| Error::PreconditionerSingular(format!("zero pivot for mode {mode:?}")))?;
    let operator = lu.solve_matrix(&a);
    let rhs = lu.solve(&sys.rhs);
    if operator.iter().chain(rhs.iter()).any(|z| !z.is_finite()) {
        return Err(Error::PreconditionerSingular("non-finite entries after solve".into()));
    }
    let singular_values = extreme_singular_values(&operator)?;
    Ok(PreconditionedSystem { mode, operator, rhs, singular_values })
}

/// Eigenvalues `μ_j²` of the Dirichlet–Dirichlet `-Δ_h` on `cells` cells.
pub fn dirichlet_laplacian_eigenvalues(cells: usize) -> Vec<f64> {
    let h = 1.0 / cells as f64;
    (1..cells)
        .map(|j| {
            let s = (j as f64 * std::f64::consts::PI * h / 2.0).sin();
            4.0 * s * s / (h * h)
        })
        .collect()
}

/// Predicted spectrum `(μ² - k̂²)/(μ² + k̂²)` (or `+ i k̂²`) of `P A` for the
/// Dirichlet–Dirichlet operator.
pub fn preconditioned_dirichlet_spectrum(k_hat: f64, mu_sq: &[f64], mode: PreconditionMode) -> Vec<Complex64> {
    let k2 = k_hat * k_hat;
    mu_sq
        .iter()
        .map(|&m| {
            let num = real(m - k2);
            match mode {
                PreconditionMode::None => num,
                PreconditionMode::RealShift => num / (m + k2),
                PreconditionMode::ImaginaryShift => num / (real(m) + I * k2),
            }
        })
        .collect()
}
