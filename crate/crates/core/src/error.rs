use thiserror::Error;

/// Errors raised by the emulator.
///
/// Every variant names the stage that produced it so that experiment runs can
/// report module-tagged messages.
#[derive(Debug, Error)]
pub enum Error {
    #[error("helmholtz: {0}")]
    Domain(String),

    #[error("helmholtz: system is numerically singular (sigma_min = {sigma_min:e}, ||A|| = {norm:e})")]
    SingularSystem { sigma_min: f64, norm: f64 },

    #[error("helmholtz: preconditioner shift system could not be factorized: {0}")]
    PreconditionerSingular(String),

    #[error("dds: singular value estimation failed after {iterations} iterations (last change {residual:e})")]
    Estimation { iterations: usize, residual: f64 },

    #[error("dds: step size underflow at t = {time:e} (step {step:e})")]
    Stiffness { time: f64, step: f64 },

    #[error("dds: operator is singular (sigma_min = {0:e})")]
    SingularOperator(f64),

    #[error("schrod: propagator failed for Fourier mode {mode}: {reason}")]
    Evolution { mode: usize, reason: String },

    #[error("schrod: no p-grid node at or above the recovery threshold {threshold}")]
    RecoveryDomain { threshold: f64 },

    #[error("schrod: p-grid spacing {dp} exceeds 1 and cannot resolve the profile")]
    Resolution { dp: f64 },

    #[error("diagnostics: recovery index set is empty")]
    EmptyRecoverySet,

    #[error("diagnostics: reference vector has zero norm")]
    ZeroReference,

    #[error("shape mismatch: {0}")]
    Shape(String),

    #[error("config: {0}")]
    Config(String),

    #[error("io: {0}")]
    Io(#[from] std::io::Error),
}

impl Error {
    /// True for errors caused by invalid user input or grid setup rather than numerics.
    pub fn is_config(&self) -> bool {
        matches!(self, Error::Config(_) | Error::Domain(_) | Error::Resolution { .. } | Error::RecoveryDomain { .. })
    }
}

pub type Result<T> = std::result::Result<T, Error>;
