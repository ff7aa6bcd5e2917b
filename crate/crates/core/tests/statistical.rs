//! Distributional checks of the simulation building blocks and estimator
//! self-consistency. Sample sizes follow the documented contracts.

mod common;

use std::sync::Arc;

use barrier_smc::engine::{estimate_psi, price_mc, price_smc};
use barrier_smc::model::{self, Interval, MarketTermStructure, Monitoring, OptionSpec, PayoffKind};
use barrier_smc::oracles::{self, FlatMarket};
use barrier_smc::potentials::{self, DriftShift, PayoffPlusOne, ProposalDensity, TransitionParticle};
use barrier_smc::PotentialKind;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use statrs::distribution::{ContinuousCDF, Normal};

const MARKET: FlatMarket = FlatMarket {
    rate: 0.1,
    dividend: 0.0,
    sigma: 0.3,
    maturity: 0.5,
};

fn base_term(n: usize) -> MarketTermStructure {
    MarketTermStructure::uniform(n, 0.5, 0.1, 0.0, 0.3, 90.0, 110.0).unwrap()
}

fn spec(monitoring: Monitoring) -> OptionSpec {
    OptionSpec::new(PayoffKind::Call, 100.0, 100.0, monitoring).unwrap()
}

#[test]
fn truncated_chain_matches_rejection_sampling() {
    let iv = Interval::new(0.05, 0.1, 0.3, 0.1, 90.0, 110.0).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(41);
    for s in [93.0, 100.0, 108.0] {
        let draws = 1_000_000;
        let ours: Vec<f64> = (0..draws)
            .map(|_| model::step_truncated_chain(s, &iv, 0, rng.gen()).unwrap())
            .collect();
        let mut oracle = Vec::with_capacity(draws);
        while oracle.len() < draws {
            let next = model::step_gbm(s, &iv, rng.sample(StandardNormal));
            if iv.contains(next) {
                oracle.push(next);
            }
        }
        let (d, _) = common::ks_two_sample(ours, oracle);
        assert!(d < 0.005, "s = {s}: KS distance {d}");
    }
}

#[test]
fn gbm_log_increments_are_normal() {
    let iv = Interval::new(0.5 / 16.0, 0.1, 0.3, 0.1, 0.0, f64::INFINITY).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(42);
    let logs: Vec<f64> = (0..100_000)
        .map(|_| (model::step_gbm(100.0, &iv, rng.sample(StandardNormal)) / 100.0).ln())
        .collect();
    let law = Normal::new(iv.log_mean(), iv.log_std()).unwrap();
    let (d, p) = common::ks_one_sample(logs, |x| law.cdf(x));
    assert!(p > 0.001, "KS D = {d}, p = {p}");
}

#[test]
fn survival_probability_matches_brute_force() {
    let iv = Interval::new(0.1, 0.1, 0.3, 0.1, 90.0, 110.0).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(43);
    let draws = 1_000_000;
    for s in [91.0, 100.0, 109.0] {
        let p = model::survival_prob_phi(s, &iv);
        let hits = (0..draws)
            .filter(|_| iv.contains(model::step_gbm(s, &iv, rng.sample(StandardNormal))))
            .count() as f64
            / draws as f64;
        let se = (p * (1.0 - p) / draws as f64).sqrt();
        assert!((hits - p).abs() < 3.0 * se, "s = {s}: {hits} vs {p}");
    }
}

#[test]
fn mc_without_barriers_converges_to_black_scholes() {
    let spec = spec(Monitoring::Continuous);
    let term = base_term(1).without_barriers();
    let est = price_mc(&spec, &term, 1_000_000, &mut ChaCha8Rng::seed_from_u64(44)).unwrap();
    let bs = oracles::vanilla_bs(&spec, &MARKET).unwrap().value;
    assert!((est.price - bs).abs() < 3.0 * est.stderr.unwrap(), "{} vs {bs}", est.price);
}

#[test]
fn mc_agrees_with_the_closed_form() {
    let spec = spec(Monitoring::Continuous);
    let est = price_mc(&spec, &base_term(64), 1_000_000, &mut ChaCha8Rng::seed_from_u64(45)).unwrap();
    let exact = oracles::double_barrier_closed_form(&spec, &MARKET, 90.0, 110.0, 1e-10).unwrap().value;
    assert!((est.price - exact).abs() < 3.0 * est.stderr.unwrap(), "{} vs {exact}", est.price);
}

fn repeated(spec: &OptionSpec, term: &MarketTermStructure, kind: &PotentialKind, m: usize, reps: u64, seed: u64) -> (f64, f64) {
    let prices: Vec<f64> = (0..reps)
        .map(|r| price_smc(spec, term, m, kind, &mut ChaCha8Rng::seed_from_u64(seed + r)).unwrap().price)
        .collect();
    let (mean, sd) = common::mean_sd(&prices);
    (mean, sd / (reps as f64).sqrt())
}

#[test]
fn payoff_twist_preserves_the_mean() {
    let spec = spec(Monitoring::Discrete);
    let term = base_term(8);
    let (plain, se_plain) = repeated(&spec, &term, &PotentialKind::Standard, 100_000, 12, 1000);
    let twist = PotentialKind::PayoffTwist(Arc::new(PayoffPlusOne));
    let (twisted, se_twisted) = repeated(&spec, &term, &twist, 100_000, 12, 2000);
    let se = (se_plain * se_plain + se_twisted * se_twisted).sqrt();
    assert!((plain - twisted).abs() < 3.0 * se, "{plain} vs {twisted} (se {se})");
}

#[test]
fn drift_shifted_proposal_preserves_the_mean() {
    let spec = spec(Monitoring::Discrete);
    let term = base_term(4);
    let reference = oracles::quadrature(&spec, &term, 4.0).unwrap().value;
    for shift in [-0.3, 0.3] {
        let kind = PotentialKind::ImportanceDensity(Arc::new(DriftShift { shift }));
        let (mean, se) = repeated(&spec, &term, &kind, 20_000, 30, 3000);
        assert!((mean - reference).abs() < 4.0 * se, "shift {shift}: {mean} vs {reference} (se {se})");
    }
    let combined = PotentialKind::Combined {
        density: Arc::new(DriftShift { shift: 0.2 }),
        twist: Arc::new(PayoffPlusOne),
    };
    let (mean, se) = repeated(&spec, &term, &combined, 20_000, 30, 4000);
    assert!((mean - reference).abs() < 4.0 * se, "combined: {mean} vs {reference} (se {se})");
}

/// Composite 5-point Gauss-Legendre rule for the standard normal density on
/// `[lo, hi]`, split into `panels` equal pieces.
fn normal_nodes(lo: f64, hi: f64, panels: usize) -> Vec<(f64, f64)> {
    const X: [f64; 5] = [0.0, -0.538_469_310_105_683, 0.538_469_310_105_683, -0.906_179_845_938_664, 0.906_179_845_938_664];
    const W: [f64; 5] = [0.568_888_888_888_889, 0.478_628_670_499_366, 0.478_628_670_499_366, 0.236_926_885_056_189, 0.236_926_885_056_189];
    let width = (hi - lo) / panels as f64;
    let mut out = Vec::with_capacity(5 * panels);
    for p in 0..panels {
        let mid = lo + (p as f64 + 0.5) * width;
        for (x, w) in X.iter().zip(&W) {
            let z = mid + 0.5 * width * x;
            out.push((z, 0.5 * width * w * (-0.5 * z * z).exp() / (2.0 * std::f64::consts::PI).sqrt()));
        }
    }
    out
}

/// Two-step estimand of the weighted chain, integrated under the proposal:
/// `E_fbar[prod_n G_n f/fbar] h(S_2)`. Panels split where the proposal step
/// crosses a barrier or the strike.
fn two_step_estimand(spec: &OptionSpec, term: &MarketTermStructure, density: &dyn ProposalDensity, shift: f64) -> f64 {
    let mean = |iv: &Interval| iv.log_mean() + shift * iv.dt;
    let step = |s: f64, iv: &Interval, z: f64| s * (mean(iv) + iv.log_std() * z).exp();
    let z_of = |s: f64, iv: &Interval, target: f64| ((target / s).ln() - mean(iv)) / iv.log_std();
    let (iv1, iv2) = (term.interval(0), term.interval(1));
    let mut total = 0.0;
    for (z1, w1) in normal_nodes(z_of(spec.spot, iv1, iv1.lower), z_of(spec.spot, iv1, iv1.upper), 200) {
        let s1 = step(spec.spot, iv1, z1);
        let x1 = TransitionParticle::new(0, spec.spot, s1);
        let g1 = potentials::eval_g_importance(&x1, iv1, spec.monitoring, density).unwrap();
        let (lo, k, hi) = (z_of(s1, iv2, iv2.lower), z_of(s1, iv2, spec.strike), z_of(s1, iv2, iv2.upper));
        let inner: f64 = normal_nodes(k.max(lo), hi, 60)
            .into_iter()
            .map(|(z2, w2)| {
                let s2 = step(s1, iv2, z2);
                let x2 = TransitionParticle::new(1, s1, s2);
                w2 * potentials::eval_g_importance(&x2, iv2, spec.monitoring, density).unwrap() * spec.payoff_at(s2)
            })
            .sum();
        total += w1 * g1 * inner;
    }
    total * term.discount_factor()
}

#[test]
fn importance_weights_leave_the_two_step_estimand_unchanged() {
    let spec = spec(Monitoring::Discrete);
    let term = base_term(2);
    let reference = oracles::quadrature_small_n(&spec, &term, 4.0).unwrap().value;
    for shift in [0.0, -0.4, 0.25] {
        let d = DriftShift { shift };
        let v = two_step_estimand(&spec, &term, &d, shift);
        assert!(((v - reference) / reference).abs() < 1e-3, "shift {shift}: {v} vs {reference}");
    }
}

#[test]
fn smc_stderr_is_flat_in_steps_while_mc_grows() {
    let spec = spec(Monitoring::Continuous);
    let rel = |n: usize, smc: bool| {
        let term = base_term(n);
        let prices: Vec<f64> = (0..30u64)
            .map(|r| {
                let mut rng = ChaCha8Rng::seed_from_u64(5000 + r);
                if smc {
                    price_smc(&spec, &term, 10_000, &PotentialKind::Standard, &mut rng).unwrap().price
                } else {
                    price_mc(&spec, &term, 10_000, &mut rng).unwrap().price
                }
            })
            .collect();
        let (mean, sd) = common::mean_sd(&prices);
        sd / mean
    };
    let (smc4, smc128) = (rel(4, true), rel(128, true));
    assert!(smc128 < 2.0 * smc4 && smc4 < 2.0 * smc128, "smc {smc4} vs {smc128}");
    let (mc4, mc128) = (rel(4, false), rel(128, false));
    assert!(mc128 > 2.0 * mc4, "mc {mc4} vs {mc128}");
}

#[test]
fn survival_estimates_match_reference_values() {
    let mut rng = ChaCha8Rng::seed_from_u64(46);
    let cont = estimate_psi(&spec(Monitoring::Continuous), &base_term(128), 200_000, &mut rng).unwrap();
    assert!((cont - 0.005).abs() < 0.001, "continuous psi {cont}");
    let disc = estimate_psi(&spec(Monitoring::Discrete), &base_term(128), 200_000, &mut rng).unwrap();
    assert!((disc - 0.013).abs() < 0.002, "discrete psi {disc}");
}
