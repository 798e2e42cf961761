use std::f64::consts::PI;

use crate::error::{Error, Result};

/// Uniform periodic grid on `[-L, R)` with `points` nodes.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PGrid {
    pub left: f64,
    pub right: f64,
    pub points: usize,
}

impl PGrid {
    pub fn new(left: f64, right: f64, points: usize) -> Result<Self> {
        if !(left.is_finite() && right.is_finite() && left + right > 0.0) {
            return Err(Error::Config(format!("invalid p-domain [-{left}, {right}]")));
        }
        if points < 2 || points % 2 != 0 {
            return Err(Error::Config(format!("p-grid needs an even number of points, got {points}")));
        }
        Ok(Self { left, right, points })
    }

    /// `N_p = 2^m`.
    pub fn with_exponent(left: f64, right: f64, m: u32) -> Result<Self> {
        if m == 0 || m > 24 {
            return Err(Error::Config(format!("p-grid exponent must lie in 1..=24, got {m}")));
        }
        Self::new(left, right, 1usize << m)
    }

    pub fn width(&self) -> f64 {
        self.left + self.right
    }

    pub fn dp(&self) -> f64 {
        self.width() / self.points as f64
    }

    pub fn node(&self, j: usize) -> f64 {
        -self.left + j as f64 * self.dp()
    }

    pub fn nodes(&self) -> Vec<f64> {
        (0..self.points).map(|j| self.node(j)).collect()
    }

    /// `ν_l = 2π(l - N_p/2)/(R + L)`.
    pub fn wavenumber(&self, l: usize) -> f64 {
        2.0 * PI * (l as f64 - (self.points / 2) as f64) / self.width()
    }

    pub fn nu_max(&self) -> f64 {
        self.wavenumber(0).abs()
    }

    /// Index of the smallest node `>= p`.
    pub fn first_node_at_or_above(&self, p: f64) -> Option<usize> {
        let j = ((p + self.left) / self.dp() - 1e-12).ceil().max(0.0) as usize;
        (j < self.points).then_some(j)
    }
}

/// How the truncation `[-L, R]` of the p-axis is chosen.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum PDomain {
    /// `L = λ⁻ T + log(1/ε) + margin`, `R = λ⁺ T + log(1/ε) + margin`.
    Auto {
        margin: f64,
    },
    Fixed {
        left: f64,
        right: f64,
    },
}

impl Default for PDomain {
    fn default() -> Self {
        PDomain::Auto { margin: 1.0 }
    }
}

/// Builds the p-grid from the extreme eigenvalues of `H1`.
///
/// Returns warnings for a fixed domain that misses the truncation criterion and
/// for a grid that cannot resolve the profile (`Δp > 1`); the latter is an
/// error when `strict` is set.
pub fn choose_p_domain(
    h1_extremes: (f64, f64),
    t_final: f64,
    epsilon: f64,
    domain: PDomain,
    m: u32,
    strict: bool,
) -> Result<(PGrid, Vec<String>)> {
    if !(epsilon > 0.0 && epsilon < 1.0) {
        return Err(Error::Config(format!("epsilon must lie in (0, 1), got {epsilon}")));
    }
    let neg = (-h1_extremes.0).max(0.0) * t_final;
    let pos = h1_extremes.1.max(0.0) * t_final;
    let log_eps = (1.0 / epsilon).ln();
    let mut warnings = Vec::new();
    let grid = match domain {
        PDomain::Auto { margin } => PGrid::with_exponent(neg + log_eps + margin, pos + log_eps + margin, m)?,
        PDomain::Fixed { left, right } => {
            if left <= 0.0 || right <= 0.0 {
                return Err(Error::Config(format!("fixed p-domain needs L, R > 0, got {left}, {right}")));
            }
            if (-left + neg).exp() > epsilon {
                warnings.push(format!(
                    "schrod: L = {left} is below the truncation requirement {:.6} for epsilon = {epsilon:e}",
                    neg + log_eps
                ));
            }
            if (-right + pos).exp() > epsilon {
                warnings.push(format!(
                    "schrod: R = {right} is below the truncation requirement {:.6} for epsilon = {epsilon:e}",
                    pos + log_eps
                ));
            }
            PGrid::with_exponent(left, right, m)?
        }
    };
    let dp = grid.dp();
    if dp > 1.0 {
        if strict {
            return Err(Error::Resolution { dp });
        }
        warnings.push(format!("schrod: p-grid spacing {dp:.6} exceeds 1 and under-resolves the profile"));
    }
    Ok((grid, warnings))
}
