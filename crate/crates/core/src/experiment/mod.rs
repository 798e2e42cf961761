//! End-to-end experiment runs and convergence studies with deterministic
//! CSV and key-value outputs.

mod config;
mod run;

pub use config::{parse_lr, parse_propagator, parse_time, ExperimentConfig, TimeSpec};
pub use run::{
    checkpoint_times, output_path, run_convergence_study, run_experiment, Checkpoint, ExperimentReport, StudyReport,
    Sweep,
};
