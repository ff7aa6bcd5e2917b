//! Runs an experiment config and prints the efficiency table for every
//! particle method against plain Monte Carlo.
//!
//! cargo run --release --example run_experiment -- [config.toml] [reps]
//!
//! The bundled configs reproduce the continuous and discrete monitoring
//! tables at full size (M = 100 000, 50 repetitions); pass a small `reps`
//! for a quick look.

use barrier_smc::harness::report::format_table;
use barrier_smc::harness::{run_experiment, summarize, ExperimentConfig};

fn main() -> barrier_smc::Result<()> {
    let args: Vec<String> = std::env::args().skip(1).collect();
    let path = args
        .first()
        .cloned()
        .unwrap_or_else(|| concat!(env!("CARGO_MANIFEST_DIR"), "/examples/configs/table1.toml").to_string());
    let mut cfg = ExperimentConfig::from_path(std::path::Path::new(&path))?;
    if let Some(reps) = args.get(1).and_then(|s| s.parse().ok()) {
        cfg.reps = reps;
    }
    cfg.validate()?;

    let records = run_experiment(&cfg)?;
    let report = summarize(&records)?;
    for comparison in &report.comparisons {
        println!("{}", format_table(comparison));
    }
    println!("{}", report.stderr_convention);
    Ok(())
}
