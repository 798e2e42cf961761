use std::str::FromStr;

use super::{EvolvedState, PGrid};
use crate::error::{Error, Result};
use crate::linalg::{real, CVector};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum RecoveryStrategy {
    /// `e^{p_k} W(T, p_k)` at the smallest node `p_k >= p◇`.
    #[default]
    OnePoint,
    /// `e^{p_k} ∫_{p_k}^{R} W(T, q) dq` with the trapezoidal rule.
    Integral,
}

impl FromStr for RecoveryStrategy {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "point" | "one_point" => Ok(RecoveryStrategy::OnePoint),
            "integral" => Ok(RecoveryStrategy::Integral),
            other => Err(Error::Config(format!("unknown recovery strategy '{other}' (expected point or integral)"))),
        }
    }
}

/// Recovered `V_f(T) = [v; w; r]` split into its blocks.
#[derive(Debug, Clone)]
pub struct Recovery {
    pub v: CVector,
    pub w: CVector,
    /// Auxiliary block, constant `T F` in exact arithmetic.
    pub r: CVector,
    pub node: usize,
    pub p: f64,
}

impl Recovery {
    pub fn full(&self) -> CVector {
        let n = self.v.len();
        let mut out = CVector::zeros(4 * n);
        out.rows_mut(0, n).copy_from(&self.v);
        out.rows_mut(n, n).copy_from(&self.w);
        out.rows_mut(2 * n, 2 * n).copy_from(&self.r);
        out
    }
}

pub fn recovery_node(grid: &PGrid, p_diamond: f64) -> Result<usize> {
    grid.first_node_at_or_above(p_diamond).ok_or(Error::RecoveryDomain { threshold: p_diamond })
}

/// Recovers `V_f(T)` from the evolved grid function.
pub fn recover(state: &EvolvedState, grid: &PGrid, p_diamond: f64, strategy: RecoveryStrategy) -> Result<Recovery> {
    let node = recovery_node(grid, p_diamond)?;
    let p = grid.node(node);
    let full = match strategy {
        RecoveryStrategy::OnePoint => state.at_node(node) * real(p.exp()),
        RecoveryStrategy::Integral => {
            let last = grid.points - 1;
            let mut acc = CVector::zeros(state.w.ncols());
            for k in node..=last {
                let weight = if (k == node || k == last) && node != last { 0.5 } else { 1.0 };
                acc += state.at_node(k) * real(weight);
            }
            acc * real(p.exp() * grid.dp())
        }
    };
    let n = full.len() / 4;
    Ok(Recovery {
        v: full.rows(0, n).into_owned(),
        w: full.rows(n, n).into_owned(),
        r: full.rows(2 * n, 2 * n).into_owned(),
        node,
        p,
    })
}
