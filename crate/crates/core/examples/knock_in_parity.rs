//! Knock-in prices from both estimators, checked against
//! knock-in + knock-out = vanilla.

use barrier_smc::engine::{price, price_knock_in, Method};
use barrier_smc::model::{MarketTermStructure, Monitoring, OptionSpec, PayoffKind};
use barrier_smc::oracles::{double_barrier_closed_form, vanilla_bs, FlatMarket};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn main() -> barrier_smc::Result<()> {
    let market = FlatMarket { rate: 0.1, dividend: 0.0, sigma: 0.3, maturity: 0.5 };
    let term = MarketTermStructure::uniform(64, 0.5, 0.1, 0.0, 0.3, 90.0, 110.0)?;
    for payoff in [PayoffKind::Call, PayoffKind::Put] {
        let ko = OptionSpec::new(payoff, 100.0, 100.0, Monitoring::Continuous)?;
        let vanilla = vanilla_bs(&ko, &market)?.value;
        let exact_ko = double_barrier_closed_form(&ko, &market, 90.0, 110.0, 1e-12)?.value;
        println!("{payoff:?}: vanilla {vanilla:.5}, knock-out {exact_ko:.5}, knock-in {:.5}", vanilla - exact_ko);
        for method in [Method::Mc, Method::Smc] {
            let ki = price_knock_in(&ko.knock_in(), &term, method, 100_000, &mut ChaCha8Rng::seed_from_u64(7))?;
            let ko_est = price(&ko, &term, method, 100_000, &mut ChaCha8Rng::seed_from_u64(8))?;
            let se = match (ki.stderr, ko_est.stderr) {
                (Some(a), Some(b)) => format!("  (se {:.5})", (a * a + b * b).sqrt()),
                _ => String::new(),
            };
            println!(
                "  {:<4} knock-in {:.5}  knock-out {:.5}  sum - vanilla {:+.5}{se}",
                method.as_str(),
                ki.price,
                ko_est.price,
                ki.price + ko_est.price - vanilla
            );
        }
    }
    Ok(())
}
