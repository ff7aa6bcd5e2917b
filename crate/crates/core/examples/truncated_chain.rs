//! The chain conditioned to stay inside the window at every grid date:
//! one-step survival probabilities, inverse-CDF draws, and the estimator
//! built on it compared with the standard one.

use barrier_smc::engine::price_smc;
use barrier_smc::model::{step_truncated_chain, survival_prob_phi, Interval, MarketTermStructure, Monitoring, OptionSpec, PayoffKind};
use barrier_smc::PotentialKind;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn main() -> barrier_smc::Result<()> {
    let iv = Interval::new(0.5 / 16.0, 0.1, 0.3, 0.1, 90.0, 110.0)?;
    println!("{:>8} {:>10} {:>12}", "s_prev", "phi", "mean draw");
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    for s in [90.5, 95.0, 100.0, 105.0, 109.5] {
        let draws = 20_000;
        let mean = (0..draws)
            .map(|_| step_truncated_chain(s, &iv, 0, rng.gen()))
            .sum::<barrier_smc::Result<f64>>()?
            / draws as f64;
        println!("{s:>8} {:>10.6} {mean:>12.4}", survival_prob_phi(s, &iv));
    }

    for monitoring in [Monitoring::Discrete, Monitoring::Continuous] {
        let spec = OptionSpec::new(PayoffKind::Call, 100.0, 100.0, monitoring)?;
        let term = MarketTermStructure::uniform(16, 0.5, 0.1, 0.0, 0.3, 90.0, 110.0)?;
        for (name, kind) in [("standard", PotentialKind::Standard), ("truncated", PotentialKind::TruncatedChain)] {
            let prices: Vec<f64> = (0..20)
                .map(|rep| price_smc(&spec, &term, 20_000, &kind, &mut ChaCha8Rng::seed_from_u64(rep)).map(|e| e.price))
                .collect::<barrier_smc::Result<_>>()?;
            let mean = prices.iter().sum::<f64>() / prices.len() as f64;
            let sd = (prices.iter().map(|p| (p - mean).powi(2)).sum::<f64>() / (prices.len() - 1) as f64).sqrt();
            println!("{monitoring:?} {name:<10} mean {mean:.6}  sd per run {sd:.2e}");
        }
    }
    Ok(())
}
