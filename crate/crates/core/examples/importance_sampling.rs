//! Importance-sampling variants of the particle estimator: a drift-shifted
//! proposal and a payoff twist, next to the standard potential.

use std::sync::Arc;

use barrier_smc::engine::price_smc;
use barrier_smc::model::{MarketTermStructure, Monitoring, OptionSpec, PayoffKind};
use barrier_smc::potentials::{DriftShift, PayoffPlusOne};
use barrier_smc::PotentialKind;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn main() -> barrier_smc::Result<()> {
    let spec = OptionSpec::new(PayoffKind::Call, 100.0, 100.0, Monitoring::Continuous)?;
    let term = MarketTermStructure::uniform(32, 0.5, 0.1, 0.0, 0.3, 90.0, 110.0)?;
    let kinds = [
        ("standard", PotentialKind::Standard),
        ("drift +0.2", PotentialKind::ImportanceDensity(Arc::new(DriftShift { shift: 0.2 }))),
        ("drift -0.2", PotentialKind::ImportanceDensity(Arc::new(DriftShift { shift: -0.2 }))),
        ("payoff twist", PotentialKind::PayoffTwist(Arc::new(PayoffPlusOne))),
    ];
    println!("{:<14} {:>10} {:>10} {:>8}", "kind", "mean", "sd/mean", "secs");
    for (name, kind) in &kinds {
        let runs: Vec<_> = (0..20)
            .map(|rep| price_smc(&spec, &term, 20_000, kind, &mut ChaCha8Rng::seed_from_u64(100 + rep)))
            .collect::<barrier_smc::Result<_>>()?;
        let n = runs.len() as f64;
        let mean = runs.iter().map(|r| r.price).sum::<f64>() / n;
        let sd = (runs.iter().map(|r| (r.price - mean).powi(2)).sum::<f64>() / (n - 1.0)).sqrt();
        let secs: f64 = runs.iter().map(|r| r.seconds).sum::<f64>() / n;
        println!("{name:<14} {mean:>10.6} {:>10.4} {secs:>8.4}", sd / mean);
    }
    Ok(())
}
