use std::fmt::Write as _;
use std::path::PathBuf;

use crate::error::{Error, Result};
use crate::helmholtz::PreconditionMode;
use crate::schrod::{PDomain, Profile, Propagator, RecoveryStrategy};

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum TimeSpec {
    /// `log(3/ε)/σ_min`, rounded up.
    Auto,
    Fixed(f64),
}

/// One end-to-end run. Keys of the flat `key = value` file mirror the CLI flags.
#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentConfig {
    pub k: f64,
    /// Mesh exponent, `h = 2^-n`.
    pub n: u32,
    /// Overrides `2^n` cells when set.
    pub cells: Option<usize>,
    /// `N_p = 2^m`.
    pub m: u32,
    pub t: TimeSpec,
    pub psi: Profile,
    pub precondition: PreconditionMode,
    pub lr: PDomain,
    /// Target accuracy; a third of it goes to the stopping rule and to the p-truncation.
    pub epsilon: f64,
    pub recovery: RecoveryStrategy,
    pub propagator: Propagator,
    pub threads: usize,
    /// Number of log-spaced checkpoint times, 0 to skip the time series.
    pub checkpoints: usize,
    pub out: Option<PathBuf>,
    pub strict: bool,
    pub seed: u64,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        Self {
            k: 10.0,
            n: 4,
            cells: None,
            m: 8,
            t: TimeSpec::Auto,
            psi: Profile::Cubic,
            precondition: PreconditionMode::None,
            lr: PDomain::default(),
            epsilon: 1e-3,
            recovery: RecoveryStrategy::OnePoint,
            propagator: Propagator::Auto,
            threads: 0,
            checkpoints: 32,
            out: None,
            strict: false,
            seed: 0,
        }
    }
}

fn parse_num<T: std::str::FromStr>(key: &str, value: &str) -> Result<T> {
    value.parse().map_err(|_| Error::Config(format!("invalid value '{value}' for {key}")))
}

pub fn parse_time(value: &str) -> Result<TimeSpec> {
    if value == "auto" {
        Ok(TimeSpec::Auto)
    } else {
        parse_num("t", value).map(TimeSpec::Fixed)
    }
}

/// `auto` or `L,R`.
pub fn parse_lr(value: &str) -> Result<PDomain> {
    if value == "auto" {
        return Ok(PDomain::default());
    }
    let (l, r) = value
        .split_once(',')
        .ok_or_else(|| Error::Config(format!("invalid value '{value}' for lr (expected auto or L,R)")))?;
    Ok(PDomain::Fixed { left: parse_num("lr", l.trim())?, right: parse_num("lr", r.trim())? })
}

pub fn parse_propagator(value: &str) -> Result<Propagator> {
    match value {
        "auto" => Ok(Propagator::Auto),
        "spectral" => Ok(Propagator::Spectral),
        "pade" | "scaling_squaring" => Ok(Propagator::ScalingSquaring),
        "krylov" => Ok(Propagator::Krylov),
        other => Err(Error::Config(format!("unknown propagator '{other}'"))),
    }
}

fn parse_bool(key: &str, value: &str) -> Result<bool> {
    match value {
        "true" | "1" | "yes" => Ok(true),
        "false" | "0" | "no" => Ok(false),
        _ => Err(Error::Config(format!("invalid value '{value}' for {key}"))),
    }
}

impl ExperimentConfig {
    /// Sets one field from its textual form.
    pub fn set(&mut self, key: &str, value: &str) -> Result<()> {
        let value = value.trim();
        match key.trim() {
            "k" => self.k = parse_num("k", value)?,
            "n" => self.n = parse_num("n", value)?,
            "cells" => self.cells = if value == "auto" { None } else { Some(parse_num("cells", value)?) },
            "m" => self.m = parse_num("m", value)?,
            "t" | "T" => self.t = parse_time(value)?,
            "psi" => self.psi = value.parse()?,
            "precondition" => self.precondition = value.parse()?,
            "lr" => self.lr = parse_lr(value)?,
            "epsilon" => self.epsilon = parse_num("epsilon", value)?,
            "recovery" => self.recovery = value.parse()?,
            "propagator" => self.propagator = parse_propagator(value)?,
            "threads" => self.threads = parse_num("threads", value)?,
            "checkpoints" => self.checkpoints = parse_num("checkpoints", value)?,
            "out" => self.out = Some(PathBuf::from(value)),
            "strict" => self.strict = parse_bool("strict", value)?,
            "seed" => self.seed = parse_num("seed", value)?,
            other => return Err(Error::Config(format!("unknown config key '{other}'"))),
        }
        Ok(())
    }

    /// Parses `key = value` lines on top of the defaults; `#` starts a comment.
    pub fn from_key_value_text(text: &str) -> Result<Self> {
        let mut cfg = Self::default();
        cfg.apply_key_value_text(text)?;
        Ok(cfg)
    }

    pub fn apply_key_value_text(&mut self, text: &str) -> Result<()> {
        for (lineno, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (key, value) = line
                .split_once('=')
                .ok_or_else(|| Error::Config(format!("line {}: expected key = value", lineno + 1)))?;
            self.set(key, value).map_err(|e| match e {
                Error::Config(msg) => Error::Config(format!("line {}: {msg}", lineno + 1)),
                other => other,
            })?;
        }
        Ok(())
    }

    pub fn to_key_value_text(&self) -> String {
        let mut s = String::new();
        let _ = writeln!(s, "k = {}", self.k);
        let _ = writeln!(s, "n = {}", self.n);
        if let Some(c) = self.cells {
            let _ = writeln!(s, "cells = {c}");
        }
        let _ = writeln!(s, "m = {}", self.m);
        match self.t {
            TimeSpec::Auto => {
                let _ = writeln!(s, "t = auto");
            }
            TimeSpec::Fixed(t) => {
                let _ = writeln!(s, "t = {t}");
            }
        }
        let _ = writeln!(s, "psi = {}", self.psi);
        let _ = writeln!(s, "precondition = {}", self.precondition.name());
        match self.lr {
            PDomain::Auto { .. } => {
                let _ = writeln!(s, "lr = auto");
            }
            PDomain::Fixed { left, right } => {
                let _ = writeln!(s, "lr = {left},{right}");
            }
        }
        let _ = writeln!(s, "epsilon = {}", self.epsilon);
        let recovery = match self.recovery {
            RecoveryStrategy::OnePoint => "point",
            RecoveryStrategy::Integral => "integral",
        };
        let _ = writeln!(s, "recovery = {recovery}");
        let propagator = match self.propagator {
            Propagator::Auto => "auto",
            Propagator::Spectral => "spectral",
            Propagator::ScalingSquaring => "pade",
            Propagator::Krylov => "krylov",
        };
        let _ = writeln!(s, "propagator = {propagator}");
        let _ = writeln!(s, "threads = {}", self.threads);
        let _ = writeln!(s, "checkpoints = {}", self.checkpoints);
        if let Some(out) = &self.out {
            let _ = writeln!(s, "out = {}", out.display());
        }
        let _ = writeln!(s, "strict = {}", self.strict);
        let _ = writeln!(s, "seed = {}", self.seed);
        s
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.k > 0.0 && self.k.is_finite()) {
            return Err(Error::Config(format!("k must be positive, got {}", self.k)));
        }
        if self.n == 0 && self.cells.is_none() {
            return Err(Error::Config("n must be at least 1".into()));
        }
        if self.m == 0 {
            return Err(Error::Config("m must be at least 1".into()));
        }
        if !(self.epsilon > 0.0 && self.epsilon < 1.0) {
            return Err(Error::Config(format!("epsilon must lie in (0, 1), got {}", self.epsilon)));
        }
        if let TimeSpec::Fixed(t) = self.t {
            if !(t > 0.0 && t.is_finite()) {
                return Err(Error::Config(format!("t must be positive, got {t}")));
            }
        }
        if let PDomain::Fixed { left, right } = self.lr {
            if !(left > 0.0 && right > 0.0) {
                return Err(Error::Config(format!("L and R must be positive, got {left},{right}")));
            }
        }
        Ok(())
    }

    /// Number of cells, `2^n` unless overridden.
    pub fn cell_count(&self) -> Result<usize> {
        match self.cells {
            Some(c) => Ok(c),
            None if self.n <= 24 => Ok(1usize << self.n),
            None => Err(Error::Config(format!("mesh exponent {} too large", self.n))),
        }
    }

    /// Tolerance handed to the stopping rule and the p-truncation.
    pub fn stage_epsilon(&self) -> f64 {
        self.epsilon / 3.0
    }
}
