//! Measurement probabilities, query-cost estimates and error metrics computed
//! from classical state vectors.

use crate::error::{Error, Result};
use crate::linalg::{CMatrix, CVector};
use crate::schrod::{hermitian_bounds, EvolvedState, PGrid, Profile};

/// Recovery nodes satisfy `p◇ <= p_k <= DEFAULT_LOG_CAP`, i.e. `e^{p_k} <= e²`.
pub const DEFAULT_LOG_CAP: f64 = 2.0;

/// Headroom applied to the block-encoding factor.
pub const ALPHA_HEADROOM: f64 = 1.05;

/// Nodes `p◇ <= p_k <= log_cap`.
pub fn recovery_index_set(grid: &PGrid, p_diamond: f64, log_cap: f64) -> Vec<usize> {
    (0..grid.points)
        .filter(|&k| {
            let p = grid.node(k);
            p >= p_diamond - 1e-12 && p <= log_cap + 1e-12
        })
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MeasurementReport {
    /// `(Σ_k ψ(p_k)²)^{1/2}`.
    pub ce: f64,
    /// Same sum restricted to the recovery set.
    pub ce0: f64,
    /// `‖W(T)‖² / ‖W(0)‖²`.
    pub pr0: f64,
    /// Share of `‖W(T)‖²` on the recovery set.
    pub pr_star: f64,
    /// Share of the recovery-set mass carried by the `v` block.
    pub v_fraction: f64,
    /// Probability of landing on the `v` block of a recovery node.
    pub pv: f64,
    /// `(C_e / C_e0) T ‖b‖ / ‖v‖`.
    pub g_repeats: f64,
    pub recovery_nodes: usize,
}

impl MeasurementReport {
    pub fn fields(&self) -> Vec<(&'static str, f64)> {
        vec![
            ("ce", self.ce),
            ("ce0", self.ce0),
            ("pr0", self.pr0),
            ("pr_star", self.pr_star),
            ("v_fraction", self.v_fraction),
            ("pv", self.pv),
            ("g_repeats", self.g_repeats),
            ("recovery_nodes", self.recovery_nodes as f64),
        ]
    }
}

/// Probability chain of the final measurement.
///
/// `v` is the recovered solution and `b` the right-hand side of the system the
/// flow was built from.
#[allow(clippy::too_many_arguments)]
pub fn measurement_report(
    state: &EvolvedState,
    grid: &PGrid,
    profile: Profile,
    p_diamond: f64,
    log_cap: f64,
    v: &CVector,
    b: &CVector,
    t_final: f64,
) -> Result<MeasurementReport> {
    let set = recovery_index_set(grid, p_diamond, log_cap);
    if set.is_empty() {
        return Err(Error::EmptyRecoverySet);
    }
    let n = v.len();
    let nodes = grid.nodes();
    let ce = nodes.iter().map(|&p| profile.value(p).powi(2)).sum::<f64>().sqrt();
    let ce0 = set.iter().map(|&k| profile.value(nodes[k]).powi(2)).sum::<f64>().sqrt();

    let mass0 = state.norm0 * state.norm0;
    let mass_t = state.norm_t * state.norm_t;
    let row_mass = |w: &CMatrix, k: usize, cols: usize| w.row(k).columns(0, cols).norm_squared();
    let set_mass: f64 = set.iter().map(|&k| row_mass(&state.w, k, state.w.ncols())).sum();
    let v_mass: f64 = set.iter().map(|&k| row_mass(&state.w, k, n)).sum();

    let v_norm = v.norm();
    let g_repeats = if v_norm > 0.0 { ce / ce0 * t_final * b.norm() / v_norm } else { f64::INFINITY };
    Ok(MeasurementReport {
        ce,
        ce0,
        pr0: mass_t / mass0,
        pr_star: set_mass / mass_t,
        v_fraction: v_mass / set_mass,
        pv: v_mass / mass0,
        g_repeats,
        recovery_nodes: set.len(),
    })
}

/// Inputs of the query-count estimate.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QueryCostModel {
    /// Bound on `max(‖H1‖, ‖H2‖)`.
    pub alpha_h: f64,
    /// `max |ν_l|`.
    pub nu_max: f64,
    pub t_final: f64,
    /// Relative propagator precision `ε ‖v‖ / η₀`.
    pub delta: f64,
    pub kappa: f64,
    pub epsilon: f64,
    /// `‖W(0)‖`.
    pub eta0: f64,
    pub g_repeats: f64,
}

impl QueryCostModel {
    /// Builds the model with `α_H` set to the computed spectral norms plus headroom.
    #[allow(clippy::too_many_arguments)]
    pub fn from_run(
        h1: &CMatrix,
        h2: &CMatrix,
        grid: &PGrid,
        t_final: f64,
        kappa: f64,
        epsilon: f64,
        eta0: f64,
        v_norm: f64,
        g_repeats: f64,
    ) -> Result<Self> {
        let (lo1, hi1) = hermitian_bounds(h1)?;
        let (lo2, hi2) = hermitian_bounds(h2)?;
        let norm = lo1.abs().max(hi1.abs()).max(lo2.abs()).max(hi2.abs());
        let model = Self {
            alpha_h: ALPHA_HEADROOM * norm,
            nu_max: grid.nu_max(),
            t_final,
            delta: epsilon * v_norm / eta0,
            kappa,
            epsilon,
            eta0,
            g_repeats,
        };
        model.validate()?;
        Ok(model)
    }

    pub fn validate(&self) -> Result<()> {
        let fields = [
            ("alpha_h", self.alpha_h),
            ("nu_max", self.nu_max),
            ("t_final", self.t_final),
            ("delta", self.delta),
            ("kappa", self.kappa),
            ("epsilon", self.epsilon),
            ("eta0", self.eta0),
            ("g_repeats", self.g_repeats),
        ];
        for (name, value) in fields {
            if !(value > 0.0 && value.is_finite()) {
                return Err(Error::Config(format!(
                    "diagnostics: cost model field {name} must be positive, got {value}"
                )));
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QueryCost {
    /// `g (α_H ν_max T + log(1/δ))`.
    pub be_queries: f64,
    /// `g`.
    pub sp_queries: f64,
    /// `κ² log²(1/ε)`.
    pub headline: f64,
}

impl QueryCost {
    pub fn fields(&self) -> Vec<(&'static str, f64)> {
        vec![("be_queries", self.be_queries), ("sp_queries", self.sp_queries), ("headline", self.headline)]
    }
}

pub fn query_cost(model: &QueryCostModel) -> QueryCost {
    let log_eps = (1.0 / model.epsilon).ln();
    QueryCost {
        be_queries: model.g_repeats * (model.alpha_h * model.nu_max * model.t_final + (1.0 / model.delta).ln()),
        sp_queries: model.g_repeats,
        headline: model.kappa * model.kappa * log_eps * log_eps,
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ErrorMetrics {
    pub l2_rel: f64,
    pub linf_rel: f64,
}

impl ErrorMetrics {
    pub fn fields(&self) -> Vec<(&'static str, f64)> {
        vec![("l2_rel", self.l2_rel), ("linf_rel", self.linf_rel)]
    }
}

pub fn error_metrics(v: &CVector, reference: &CVector) -> Result<ErrorMetrics> {
    if v.len() != reference.len() {
        return Err(Error::Shape(format!(
            "vector of length {} against reference of length {}",
            v.len(),
            reference.len()
        )));
    }
    let l2 = reference.norm();
    let linf = reference.iter().fold(0.0_f64, |a, z| a.max(z.norm()));
    if l2 == 0.0 {
        return Err(Error::ZeroReference);
    }
    let diff = v - reference;
    Ok(ErrorMetrics { l2_rel: diff.norm() / l2, linf_rel: diff.iter().fold(0.0_f64, |a, z| a.max(z.norm())) / linf })
}

/// Least-squares slope of `y` against `x`.
pub fn fit_slope(x: &[f64], y: &[f64]) -> f64 {
    assert_eq!(x.len(), y.len());
    assert!(x.len() >= 2, "need two points for a slope");
    let n = x.len() as f64;
    let mx = x.iter().sum::<f64>() / n;
    let my = y.iter().sum::<f64>() / n;
    let sxy: f64 = x.iter().zip(y).map(|(a, b)| (a - mx) * (b - my)).sum();
    let sxx: f64 = x.iter().map(|a| (a - mx) * (a - mx)).sum();
    sxy / sxx
}

/// Least-squares slope of `log y` against `x`.
pub fn fit_log_slope(x: &[f64], y: &[f64]) -> f64 {
    let ly: Vec<f64> = y.iter().map(|v| v.ln()).collect();
    fit_slope(x, &ly)
}

/// Least-squares slope of `log y` against `log x`.
pub fn fit_loglog_slope(x: &[f64], y: &[f64]) -> f64 {
    let lx: Vec<f64> = x.iter().map(|v| v.ln()).collect();
    fit_log_slope(&lx, y)
}

/// Observed orders `log(d_i / d_{i+1}) / log(refinement)` from successive differences.
pub fn observed_orders(diffs: &[f64], refinement: f64) -> Vec<f64> {
    diffs.windows(2).map(|w| (w[0] / w[1]).ln() / refinement.ln()).collect()
}

/// Fixed-width lowercase scientific notation with 17 significant digits.
pub fn format_number(x: f64) -> String {
    format!("{x:.16e}")
}

/// `key = value` lines.
pub fn key_value_text(fields: &[(&str, f64)]) -> String {
    fields.iter().map(|(k, v)| format!("{k} = {}\n", format_number(*v))).collect()
}

pub fn csv_header(fields: &[(&str, f64)]) -> String {
    fields.iter().map(|(k, _)| *k).collect::<Vec<_>>().join(",")
}

pub fn csv_row(fields: &[(&str, f64)]) -> String {
    fields.iter().map(|(_, v)| format_number(*v)).collect::<Vec<_>>().join(",")
}
