//! Classical emulation of the Schrödingerization solver for indefinite linear
//! systems, applied to the dispersion-corrected 1D Helmholtz problem.
//!
//! The pipeline is `helmholtz` (discrete system) → `dds` (damped flow) →
//! `schrod` (warped-phase lift, Fourier evolution, recovery) → `diagnostics`
//! (measurement and query-cost estimates). `experiment` drives complete runs.

pub mod dds;
pub mod diagnostics;
pub mod error;
pub mod experiment;
pub mod helmholtz;
pub mod linalg;
pub mod schrod;

pub use dds::{build_damped, extreme_singular_values, DampedSystem, SingularValues};
pub use error::{Error, Result};
pub use helmholtz::{
    build_preconditioned, build_system, exact_solution, shifted_wavenumber, DiscreteHelmholtz, HelmholtzProblem,
    PreconditionMode, PreconditionedSystem,
};
