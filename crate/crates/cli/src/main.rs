use std::fs;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::Parser;
use schrodhelm::experiment::{run_convergence_study, run_experiment, ExperimentConfig, Sweep};
use schrodhelm::Error;

/// Run Schrödingerized Helmholtz experiments.
#[derive(Parser, Debug)]
#[command(name = "schrodhelm", version)]
struct Args {
    /// Flat key = value file; flags given on the command line override it
    #[arg(long)]
    config: Option<PathBuf>,
    /// Wavenumber
    #[arg(long)]
    k: Option<String>,
    /// Mesh exponent, 2^n cells
    #[arg(long)]
    n: Option<String>,
    /// Explicit cell count, overrides --n
    #[arg(long)]
    cells: Option<String>,
    /// p-grid exponent, 2^m nodes
    #[arg(long)]
    m: Option<String>,
    /// Final time or "auto"
    #[arg(long)]
    t: Option<String>,
    /// Initial profile: exp | cubic
    #[arg(long)]
    psi: Option<String>,
    /// none | real | imag
    #[arg(long)]
    precondition: Option<String>,
    /// "auto" or "L,R"
    #[arg(long, allow_hyphen_values = true)]
    lr: Option<String>,
    /// Target accuracy in (0, 1)
    #[arg(long)]
    epsilon: Option<String>,
    /// point | integral
    #[arg(long)]
    recovery: Option<String>,
    /// auto | spectral | pade | krylov
    #[arg(long)]
    propagator: Option<String>,
    /// Worker threads for the mode loop, 0 for the default pool
    #[arg(long)]
    threads: Option<String>,
    /// Number of checkpoint times for the error series
    #[arg(long)]
    checkpoints: Option<String>,
    /// Output path prefix
    #[arg(long)]
    out: Option<String>,
    /// Treat resolution warnings as errors
    #[arg(long)]
    strict: bool,
    /// Seed, reserved for randomized runs
    #[arg(long)]
    seed: Option<String>,
    /// Convergence study, e.g. n=4,5,6 or m=6,7,8 or k=10,20,40
    #[arg(long)]
    sweep: Option<String>,
}

impl Args {
    fn config(&self) -> Result<ExperimentConfig, Error> {
        let mut cfg = ExperimentConfig::default();
        if let Some(path) = &self.config {
            let text =
                fs::read_to_string(path).map_err(|e| Error::Config(format!("cannot read {}: {e}", path.display())))?;
            cfg.apply_key_value_text(&text)?;
        }
        let flags = [
            ("k", &self.k),
            ("n", &self.n),
            ("cells", &self.cells),
            ("m", &self.m),
            ("t", &self.t),
            ("psi", &self.psi),
            ("precondition", &self.precondition),
            ("lr", &self.lr),
            ("epsilon", &self.epsilon),
            ("recovery", &self.recovery),
            ("propagator", &self.propagator),
            ("threads", &self.threads),
            ("checkpoints", &self.checkpoints),
            ("out", &self.out),
            ("seed", &self.seed),
        ];
        for (key, value) in flags {
            if let Some(v) = value {
                cfg.set(key, v)?;
            }
        }
        if self.strict {
            cfg.strict = true;
        }
        cfg.validate()?;
        Ok(cfg)
    }
}

fn run(args: &Args) -> Result<(), Error> {
    let cfg = args.config()?;
    if let Some(sweep) = &args.sweep {
        let sweep = Sweep::parse(sweep)?;
        let study = run_convergence_study(&cfg, &sweep)?;
        print!("{}", study.csv());
        println!();
        print!("{}", study.fits_text());
        for f in &study.files {
            eprintln!("wrote {}", f.display());
        }
        return Ok(());
    }
    let report = run_experiment(&cfg)?;
    print!("{}", report.summary_text());
    for w in &report.warnings {
        eprintln!("warning: {w}");
    }
    for f in &report.files {
        eprintln!("wrote {}", f.display());
    }
    Ok(())
}

fn main() -> ExitCode {
    let args = Args::parse();
    match run(&args) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(if e.is_config() { 2 } else { 3 })
        }
    }
}
