//! Barriers that change over the life of the option: a window that widens
//! halfway through, priced with both estimators and the quadrature oracle.

use barrier_smc::engine::{price_mc, price_smc};
use barrier_smc::model::{Interval, MarketTermStructure, Monitoring, OptionSpec, PayoffKind};
use barrier_smc::oracles::quadrature;
use barrier_smc::PotentialKind;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn main() -> barrier_smc::Result<()> {
    let n = 16;
    let dt = 0.5 / n as f64;
    let times: Vec<f64> = (0..=n).map(|i| i as f64 * dt).collect();
    let intervals = (0..n)
        .map(|i| {
            let (lower, upper) = if i < n / 2 { (90.0, 110.0) } else { (85.0, 120.0) };
            Interval::new(dt, 0.1, 0.3, 0.1, lower, upper)
        })
        .collect::<barrier_smc::Result<Vec<_>>>()?;
    let term = MarketTermStructure::new(times, intervals)?;

    for monitoring in [Monitoring::Discrete, Monitoring::Continuous] {
        let spec = OptionSpec::new(PayoffKind::Call, 100.0, 100.0, monitoring)?;
        let oracle = quadrature(&spec, &term, 4.0)?;
        let smc = price_smc(&spec, &term, 100_000, &PotentialKind::Standard, &mut ChaCha8Rng::seed_from_u64(1))?;
        let mc = price_mc(&spec, &term, 100_000, &mut ChaCha8Rng::seed_from_u64(2))?;
        println!(
            "{monitoring:?}: quadrature {:.6} (+- {:.1e})  smc {:.6}  mc {:.6} +- {:.6}",
            oracle.value,
            oracle.accuracy,
            smc.price,
            mc.price,
            mc.stderr.unwrap_or(f64::NAN)
        );
    }
    Ok(())
}
