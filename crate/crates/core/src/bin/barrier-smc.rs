use std::path::PathBuf;
use std::process::ExitCode;

use barrier_smc::engine::Method;
use barrier_smc::harness::report::{self, OutputFormat};
use barrier_smc::harness::{run_experiment, summarize, ExperimentConfig};
use barrier_smc::model::Monitoring;
use barrier_smc::Error;
use clap::Parser;

/// Runs a barrier option pricing experiment and writes per-run records and
/// summary tables.
#[derive(Parser, Debug)]
#[command(version, about)]
struct Args {
    /// TOML experiment file.
    #[arg(long)]
    config: PathBuf,
    /// Comma-separated methods: mc, smc, smc-alt, smc-is-density, smc-is-payoff.
    #[arg(long, value_delimiter = ',')]
    method: Option<Vec<String>>,
    /// Comma-separated step counts.
    #[arg(long, value_delimiter = ',')]
    steps: Option<Vec<usize>>,
    #[arg(long)]
    particles: Option<usize>,
    #[arg(long)]
    reps: Option<usize>,
    #[arg(long)]
    seed: Option<u64>,
    /// continuous or discrete.
    #[arg(long)]
    monitoring: Option<String>,
    /// Output directory.
    #[arg(long, default_value = "out")]
    output: PathBuf,
    /// csv or json.
    #[arg(long, default_value = "csv")]
    format: String,
}

fn run(args: Args) -> barrier_smc::Result<()> {
    let mut cfg = ExperimentConfig::from_path(&args.config)?;
    if let Some(methods) = args.method {
        cfg.methods = methods.iter().map(|m| m.parse::<Method>()).collect::<Result<_, _>>()?;
    }
    if let Some(steps) = args.steps {
        cfg.steps = steps;
    }
    if let Some(m) = args.particles {
        cfg.particles = m;
    }
    if let Some(r) = args.reps {
        cfg.reps = r;
    }
    if let Some(s) = args.seed {
        cfg.seed = s;
    }
    if let Some(m) = args.monitoring {
        cfg.monitoring = match m.trim() {
            "continuous" => Monitoring::Continuous,
            "discrete" => Monitoring::Discrete,
            other => return Err(Error::Config {
                field: "monitoring".into(),
                message: format!("unknown monitoring `{other}` (expected continuous or discrete)"),
            }),
        };
    }
    let format: OutputFormat = args.format.parse()?;
    cfg.validate()?;

    let records = run_experiment(&cfg)?;
    let summary = summarize(&records)?;
    for cmp in &summary.comparisons {
        print!("{}", report::format_table(cmp));
    }
    println!("stderr: {}", summary.stderr_convention);
    println!("note: {}", summary.timing_note);
    for path in report::emit(&summary, &records, format, &args.output)? {
        println!("wrote {}", path.display());
    }
    Ok(())
}

fn main() -> ExitCode {
    let args = Args::parse();
    match run(args) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(match e {
                Error::Config { .. } | Error::InvalidInput(_) | Error::InsufficientReps { .. } => 2,
                Error::Io { .. } | Error::Format { .. } => 1,
                _ => 3,
            })
        }
    }
}
