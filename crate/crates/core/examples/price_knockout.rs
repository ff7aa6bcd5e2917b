//! Prices the double knock-out call of the reference setup with both
//! estimators and compares against the closed form.
//!
//! cargo run --release --example price_knockout -- [steps] [particles] [seed]

use barrier_smc::engine::{price_mc, price_smc};
use barrier_smc::model::{MarketTermStructure, Monitoring, OptionSpec, PayoffKind};
use barrier_smc::oracles::{double_barrier_closed_form, FlatMarket};
use barrier_smc::PotentialKind;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn main() -> barrier_smc::Result<()> {
    let args: Vec<String> = std::env::args().skip(1).collect();
    let arg = |i: usize, default: u64| args.get(i).and_then(|s| s.parse().ok()).unwrap_or(default);
    let (steps, particles, seed) = (arg(0, 128) as usize, arg(1, 100_000) as usize, arg(2, 1));

    let spec = OptionSpec::new(PayoffKind::Call, 100.0, 100.0, Monitoring::Continuous)?;
    let term = MarketTermStructure::uniform(steps, 0.5, 0.1, 0.0, 0.3, 90.0, 110.0)?;
    let market = FlatMarket { rate: 0.1, dividend: 0.0, sigma: 0.3, maturity: 0.5 };
    let exact = double_barrier_closed_form(&spec, &market, 90.0, 110.0, 1e-10)?;
    println!("closed form        {:.7}", exact.value);

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let smc = price_smc(&spec, &term, particles, &PotentialKind::Standard, &mut rng)?;
    println!(
        "smc  N={steps:<4} M={particles}  {:.7}  psi={:.4}  {:.3}s",
        smc.price,
        smc.psi.unwrap_or(f64::NAN),
        smc.seconds
    );
    let mc = price_mc(&spec, &term, particles, &mut rng)?;
    println!(
        "mc   N={steps:<4} M={particles}  {:.7} +- {:.7}  {:.3}s",
        mc.price,
        mc.stderr.unwrap_or(f64::NAN),
        mc.seconds
    );
    Ok(())
}
