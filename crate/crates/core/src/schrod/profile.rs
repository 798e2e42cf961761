use std::f64::consts::E;
use std::fmt;
use std::str::FromStr;

use crate::error::Error;

/// Initial profile `ψ(p)` of the warped-phase lift.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Profile {
    /// `e^{-|p|}`, first-order accurate recovery.
    Exponential,
    /// `e^{-|p|}` with a cubic on `(-1, 0)` matching value and slope at both ends.
    Cubic,
}

const INV_E: f64 = 1.0 / E;
const C3: f64 = -3.0 + 3.0 * INV_E;
const C2: f64 = -5.0 + 4.0 * INV_E;

impl Profile {
    pub fn value(self, p: f64) -> f64 {
        match self {
            Profile::Cubic if p > -1.0 && p < 0.0 => ((C3 * p + C2) * p - 1.0) * p + 1.0,
            _ => (-p.abs()).exp(),
        }
    }

    /// One-sided derivative from the right at kinks.
    pub fn derivative(self, p: f64) -> f64 {
        match self {
            Profile::Cubic if p > -1.0 && p < 0.0 => (3.0 * C3 * p + 2.0 * C2) * p - 1.0,
            _ if p >= 0.0 => -(-p).exp(),
            _ => p.exp(),
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Profile::Exponential => "exp",
            Profile::Cubic => "cubic",
        }
    }
}

impl fmt::Display for Profile {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Profile {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "exp" | "exp_abs" => Ok(Profile::Exponential),
            "cubic" | "cubic_smooth" => Ok(Profile::Cubic),
            other => Err(Error::Config(format!("unknown profile '{other}' (expected exp or cubic)"))),
        }
    }
}
