//! Runs a bundled config through the experiment runner and prints where the
//! artifacts went. Usage: `run_config [config] [out-dir]`.

use std::path::PathBuf;

use bbmlab::experiment::{self, ExperimentConfig};

fn main() -> bbmlab::Result<()> {
    let mut args = std::env::args().skip(1);
    let path = args
        .next()
        .map(PathBuf::from)
        .unwrap_or_else(|| PathBuf::from(concat!(env!("CARGO_MANIFEST_DIR"), "/configs/bbm_1d_linear.cfg")));
    let out = args.next().map(PathBuf::from).unwrap_or_else(|| std::env::temp_dir().join("bbmlab-run"));
    let cfg = ExperimentConfig::load(&path)?;
    let outcome = experiment::run(&cfg, &out)?;
    println!("verdict {:?} (exit code {})", outcome.report.verdict, outcome.exit_code);
    println!("artifacts in {}", out.display());
    Ok(())
}
