//! Runs one experiment from a flat config given on the command line, e.g.
//! `cargo run --release --example run -- "k=10" "n=4" "t=1000"`.
use schrodhelm::experiment::{run_experiment, ExperimentConfig};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let mut cfg = ExperimentConfig::default();
    for arg in std::env::args().skip(1) {
        let (k, v) = arg.split_once('=').ok_or("expected key=value")?;
        cfg.set(k, v)?;
    }
    let start = std::time::Instant::now();
    let report = run_experiment(&cfg)?;
    print!("{}", report.summary_text());
    eprintln!("elapsed {:.2?}", start.elapsed());
    Ok(())
}
