//! Repeated independent pricing runs over a grid of step counts.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::engine::{self, Method, PriceEstimate};
use crate::error::{Error, Result};
use crate::harness::config::ExperimentConfig;
use crate::model::{Direction, MarketTermStructure, OptionSpec};

/// Environment variable holding the number of worker threads.
pub const THREADS_ENV: &str = "BARRIER_SMC_THREADS";

/// One pricing run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunRecord {
    pub method: Method,
    #[serde(rename = "N")]
    pub steps: usize,
    #[serde(rename = "M")]
    pub particles: usize,
    pub rep: usize,
    pub price: f64,
    /// Within-run relative standard error in percent (plain Monte Carlo only).
    pub rel_stderr_pct: Option<f64>,
    pub psi: Option<f64>,
    /// Wall-clock seconds of the pricing call.
    pub cpu_seconds: f64,
    pub degenerate: bool,
}

impl RunRecord {
    fn from_estimate(est: &PriceEstimate, method: Method, rep: usize) -> Self {
        RunRecord {
            method,
            steps: est.steps,
            particles: est.particles,
            rep,
            price: est.price,
            rel_stderr_pct: est.rel_stderr().map(|s| 100.0 * s),
            psi: est.psi,
            cpu_seconds: est.seconds,
            degenerate: est.degenerate,
        }
    }
}

/// Seed of repetition `rep`.
pub fn rep_seed(base_seed: u64, rep: usize) -> u64 {
    base_seed.wrapping_add(rep as u64)
}

/// Runs one repetition of `method` with its own RNG stream.
pub fn run_once(
    spec: &OptionSpec,
    term: &MarketTermStructure,
    method: Method,
    particles: usize,
    drift_shift: f64,
    seed: u64,
) -> Result<PriceEstimate> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    match (spec.direction, method) {
        (Direction::KnockIn, _) => engine::price_knock_in(spec, term, method, particles, &mut rng),
        (Direction::KnockOut, Method::Mc) => engine::price_mc(spec, term, particles, &mut rng),
        (Direction::KnockOut, _) => {
            engine::price_smc(spec, term, particles, &method.potential_kind(drift_shift), &mut rng)
        }
    }
}

/// Thread count from [`THREADS_ENV`], if set to a positive integer.
pub fn threads_from_env() -> Result<Option<usize>> {
    match std::env::var(THREADS_ENV) {
        Err(_) => Ok(None),
        Ok(v) => match v.trim().parse::<usize>() {
            Ok(n) if n > 0 => Ok(Some(n)),
            _ => Err(Error::config(THREADS_ENV, format!("expected a positive integer, got `{v}`"))),
        },
    }
}

/// Runs `cfg.reps` repetitions for every step count and method. Records are
/// ordered by step count, then method (config order), then repetition.
/// Repetition `i` uses seed `cfg.seed + i` whatever the thread count.
pub fn run_experiment(cfg: &ExperimentConfig) -> Result<Vec<RunRecord>> {
    cfg.validate()?;
    let mut builder = rayon::ThreadPoolBuilder::new();
    if let Some(n) = threads_from_env()? {
        builder = builder.num_threads(n);
    }
    let pool = builder
        .build()
        .map_err(|e| Error::config(THREADS_ENV, format!("cannot start thread pool: {e}")))?;
    let spec = cfg.option_spec()?;
    let mut records = Vec::with_capacity(cfg.steps.len() * cfg.methods.len() * cfg.reps);
    for &n in &cfg.steps {
        let term = cfg.term_structure(n)?;
        for &method in &cfg.methods {
            let runs: Vec<RunRecord> = pool.install(|| {
                (0..cfg.reps)
                    .into_par_iter()
                    .map(|rep| {
                        let est = run_once(&spec, &term, method, cfg.particles, cfg.drift_shift, rep_seed(cfg.seed, rep))?;
                        Ok(RunRecord::from_estimate(&est, method, rep))
                    })
                    .collect::<Result<_>>()
            })?;
            records.extend(runs);
        }
    }
    Ok(records)
}
