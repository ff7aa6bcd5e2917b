//! Monte Carlo and sequential Monte Carlo price estimators.
//!
//! Both estimate `B_{0,T} E[h(S_N) prod_n G_n(X_n)]`. The plain estimator
//! averages that product over independent paths. The particle estimator
//! evolves `M` particles interval by interval; after each interval a particle
//! is kept with probability equal to its potential and every rejected particle
//! is replaced by a draw from the potential-weighted empirical distribution of
//! the proposals. The price is the discounted product of the mean potentials
//! times the mean terminal payoff of the surviving population.
//!
//! # Random stream layout
//!
//! Each run consumes one caller-owned RNG. Per interval the particle
//! estimator draws, in this order: the `M` proposal variates (particle 1..M),
//! the `M` acceptance uniforms, then the `R + 1` exponentials of the
//! resampler. Acceptance uniforms are skipped when every potential is 0 or 1
//! (discrete monitoring on the plain chain), and unbounded potential kinds
//! resample the whole population instead. The plain estimator draws the
//! `N` normals of path 1, then path 2, and so on.

use std::fmt;
use std::str::FromStr;
use std::sync::Arc;
use std::time::Instant;

use rand::{Rng, RngCore};
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::bridge::{self, BridgeQuery};
use crate::error::{Error, Result};
use crate::model::{self, Direction, MarketTermStructure, Monitoring, OptionSpec};
use crate::potentials::{self, DriftShift, PayoffPlusOne, PotentialKind, TransitionParticle};
use crate::resampler;

/// Estimator plus potential family, as named on the command line.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Method {
    #[serde(rename = "mc")]
    Mc,
    #[serde(rename = "smc")]
    Smc,
    #[serde(rename = "smc-alt")]
    SmcAlt,
    #[serde(rename = "smc-is-density")]
    SmcIsDensity,
    #[serde(rename = "smc-is-payoff")]
    SmcIsPayoff,
}

impl Method {
    pub const ALL: [Method; 5] = [
        Method::Mc,
        Method::Smc,
        Method::SmcAlt,
        Method::SmcIsDensity,
        Method::SmcIsPayoff,
    ];

    pub fn as_str(&self) -> &'static str {
        match self {
            Method::Mc => "mc",
            Method::Smc => "smc",
            Method::SmcAlt => "smc-alt",
            Method::SmcIsDensity => "smc-is-density",
            Method::SmcIsPayoff => "smc-is-payoff",
        }
    }

    pub fn is_particle(&self) -> bool {
        !matches!(self, Method::Mc)
    }

    /// Potential family used by the particle estimator for this method.
    /// `drift_shift` parameterises the proposal of `smc-is-density`.
    pub fn potential_kind(&self, drift_shift: f64) -> PotentialKind {
        match self {
            Method::Mc | Method::Smc => PotentialKind::Standard,
            Method::SmcAlt => PotentialKind::TruncatedChain,
            Method::SmcIsDensity => PotentialKind::ImportanceDensity(Arc::new(DriftShift { shift: drift_shift })),
            Method::SmcIsPayoff => PotentialKind::PayoffTwist(Arc::new(PayoffPlusOne)),
        }
    }
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Method {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Method::ALL
            .iter()
            .copied()
            .find(|m| m.as_str() == s.trim())
            .ok_or_else(|| {
                Error::config(
                    "method",
                    format!("unknown method `{s}` (expected mc, smc, smc-alt, smc-is-density or smc-is-payoff)"),
                )
            })
    }
}

/// Result of one pricing run.
#[derive(Debug, Clone, PartialEq)]
pub struct PriceEstimate {
    pub price: f64,
    /// Absolute standard error from within the run. Only the plain Monte Carlo
    /// estimator has one; particle estimates need independent repetitions.
    pub stderr: Option<f64>,
    pub particles: usize,
    pub steps: usize,
    pub method: Method,
    /// Survival probability estimate: share of paths never outside the window
    /// at grid dates (plain MC) or the product of mean potentials (particle
    /// methods). `None` for payoff-twisted runs.
    pub psi: Option<f64>,
    /// All particles had zero potential at some interval; the price is 0.
    pub degenerate: bool,
    pub seconds: f64,
}

impl PriceEstimate {
    /// Standard error relative to the price, if both are available and the price is non-zero.
    pub fn rel_stderr(&self) -> Option<f64> {
        self.stderr.filter(|_| self.price != 0.0).map(|s| s / self.price.abs())
    }
}

/// Snapshot of the particle population after the selection of one interval.
#[derive(Debug, Clone)]
pub struct ParticleEnsemble<'a> {
    /// Zero-based interval index.
    pub step: usize,
    /// Start points of the proposed transitions.
    pub starts: &'a [f64],
    /// Potential of each proposed transition.
    pub potentials: &'a [f64],
    /// Number of particles rejected and recycled at this interval.
    pub rejected: usize,
    /// Endpoints after recycling; the start points of the next interval.
    pub endpoints: &'a [f64],
}

fn ensure_knock_out(spec: &OptionSpec) -> Result<()> {
    if spec.direction != Direction::KnockOut {
        return Err(Error::InvalidInput("knock-in options are priced with price_knock_in".into()));
    }
    Ok(())
}

fn ensure_sample_size(n: usize) -> Result<()> {
    if n < 2 {
        return Err(Error::InvalidInput(format!("need at least 2 paths or particles, got {n}")));
    }
    Ok(())
}

fn spot_inside(spec: &OptionSpec, term: &MarketTermStructure) -> bool {
    term.interval(0).contains(spec.spot)
}

/// Per-path discounted vanilla payoff, weight `prod_n G_n` and whether the
/// path stayed inside the window at every grid date. Every path is simulated
/// to maturity. Under continuous monitoring the bridge factors are only
/// evaluated for paths that survived the grid dates and finish in the money,
/// since every other path has zero weighted payoff.
fn simulate_paths<R, F>(spec: &OptionSpec, term: &MarketTermStructure, paths: usize, rng: &mut R, mut visit: F) -> Result<()>
where
    R: Rng + ?Sized,
    F: FnMut(f64, f64, bool),
{
    let disc = term.discount_factor();
    let intervals = term.intervals();
    let continuous = spec.monitoring == Monitoring::Continuous;
    let mut path = vec![0.0; intervals.len() + 1];
    for _ in 0..paths {
        let mut s = spec.spot;
        let mut inside = true;
        path[0] = s;
        for (n, iv) in intervals.iter().enumerate() {
            let z: f64 = rng.sample(StandardNormal);
            s = model::step_gbm(s, iv, z);
            path[n + 1] = s;
            inside &= iv.contains(s);
        }
        let payoff = disc * potentials::eval_h(s, spec);
        let mut weight = if inside { 1.0 } else { 0.0 };
        if inside && payoff > 0.0 && continuous {
            for (n, iv) in intervals.iter().enumerate() {
                weight *= bridge::no_hit_prob(&BridgeQuery::new(path[n], path[n + 1], iv))?;
                if weight == 0.0 {
                    break;
                }
            }
        }
        visit(payoff, weight, inside);
    }
    Ok(())
}

/// Running mean and variance (Welford).
#[derive(Debug, Default, Clone, Copy)]
struct Moments {
    n: usize,
    mean: f64,
    m2: f64,
}

impl Moments {
    #[inline]
    fn push(&mut self, x: f64) {
        self.n += 1;
        let d = x - self.mean;
        self.mean += d / self.n as f64;
        self.m2 += d * (x - self.mean);
    }

    fn stderr(&self) -> f64 {
        if self.n < 2 {
            return f64::NAN;
        }
        (self.m2 / (self.n - 1) as f64 / self.n as f64).sqrt()
    }
}

fn zero_estimate(method: Method, particles: usize, steps: usize, start: Instant) -> PriceEstimate {
    PriceEstimate {
        price: 0.0,
        stderr: Some(0.0),
        particles,
        steps,
        method,
        psi: Some(0.0),
        degenerate: false,
        seconds: start.elapsed().as_secs_f64(),
    }
}

/// Standard Monte Carlo estimate of a knock-out option over `paths`
/// independent paths. The monitoring mode comes from `spec`.
pub fn price_mc<R: Rng + ?Sized>(
    spec: &OptionSpec,
    term: &MarketTermStructure,
    paths: usize,
    rng: &mut R,
) -> Result<PriceEstimate> {
    let start = Instant::now();
    ensure_knock_out(spec)?;
    ensure_sample_size(paths)?;
    if !spot_inside(spec, term) {
        return Ok(zero_estimate(Method::Mc, paths, term.steps(), start));
    }
    let mut moments = Moments::default();
    let mut survivors = 0usize;
    simulate_paths(spec, term, paths, rng, |payoff, weight, inside| {
        moments.push(payoff * weight);
        survivors += inside as usize;
    })?;
    Ok(PriceEstimate {
        price: moments.mean,
        stderr: Some(moments.stderr()),
        particles: paths,
        steps: term.steps(),
        method: Method::Mc,
        psi: Some(survivors as f64 / paths as f64),
        degenerate: false,
        seconds: start.elapsed().as_secs_f64(),
    })
}

/// Sequential Monte Carlo estimate of a knock-out option with `particles` particles.
pub fn price_smc<R: Rng>(
    spec: &OptionSpec,
    term: &MarketTermStructure,
    particles: usize,
    kind: &PotentialKind,
    rng: &mut R,
) -> Result<PriceEstimate> {
    run_smc(spec, term, particles, kind, rng, None)
}

/// [`price_smc`] calling `observe` with the population after every interval.
pub fn price_smc_observed<R, F>(
    spec: &OptionSpec,
    term: &MarketTermStructure,
    particles: usize,
    kind: &PotentialKind,
    rng: &mut R,
    mut observe: F,
) -> Result<PriceEstimate>
where
    R: Rng,
    F: FnMut(&ParticleEnsemble<'_>),
{
    run_smc(spec, term, particles, kind, rng, Some(&mut observe))
}

fn run_smc<R: Rng>(
    spec: &OptionSpec,
    term: &MarketTermStructure,
    particles: usize,
    kind: &PotentialKind,
    rng: &mut R,
    mut observe: Option<&mut dyn FnMut(&ParticleEnsemble<'_>)>,
) -> Result<PriceEstimate> {
    let start = Instant::now();
    ensure_knock_out(spec)?;
    ensure_sample_size(particles)?;
    let method = match kind {
        PotentialKind::Standard => Method::Smc,
        PotentialKind::TruncatedChain => Method::SmcAlt,
        PotentialKind::ImportanceDensity(_) => Method::SmcIsDensity,
        PotentialKind::PayoffTwist(_) | PotentialKind::Combined { .. } => Method::SmcIsPayoff,
    };
    let n_steps = term.steps();
    if !spot_inside(spec, term) {
        return Ok(zero_estimate(method, particles, n_steps, start));
    }
    let m_f = particles as f64;
    let indicator_only = matches!(kind, PotentialKind::Standard) && spec.monitoring == Monitoring::Discrete;
    // The standard continuous kind moves ln S instead, so the bridge needs no
    // logarithms; prices are only formed when observed and at maturity.
    let track_logs = matches!(kind, PotentialKind::Standard) && spec.monitoring == Monitoring::Continuous;
    let twist = kind.twist();

    let mut current = vec![spec.spot; particles];
    let mut proposed = vec![0.0; particles];
    let mut weights = vec![0.0; particles];
    let mut phi = vec![0.0; particles];
    let mut rejected: Vec<usize> = Vec::with_capacity(particles);
    let mut cumulative = Vec::with_capacity(particles);
    let mut uniforms = Vec::with_capacity(particles);
    let mut picks: Vec<usize> = Vec::with_capacity(particles);
    let mut scratch = vec![0.0; particles];
    let log_len = if track_logs { particles } else { 0 };
    let mut current_log = vec![spec.spot.ln(); log_len];
    let mut proposed_log = vec![0.0; log_len];

    let mut gamma = 1.0;
    for (n, iv) in term.intervals().iter().enumerate() {
        // Proposition.
        match kind {
            PotentialKind::Standard if track_logs => {
                for (next, &y) in proposed_log.iter_mut().zip(&current_log) {
                    let z: f64 = rng.sample(StandardNormal);
                    *next = y + iv.log_mean() + iv.log_std() * z;
                }
            }
            PotentialKind::Standard | PotentialKind::PayoffTwist(_) => {
                for (next, &s) in proposed.iter_mut().zip(&current) {
                    let z: f64 = rng.sample(StandardNormal);
                    *next = model::step_gbm(s, iv, z);
                }
            }
            PotentialKind::TruncatedChain => {
                for ((next, p), &s) in proposed.iter_mut().zip(phi.iter_mut()).zip(&current) {
                    let u: f64 = rng.gen();
                    let (survival, step) = model::truncated_step_with_phi(s, iv, u);
                    *p = survival;
                    // A start point with no way into the window keeps zero weight.
                    *next = step.unwrap_or(s);
                    if step.is_none() {
                        *p = 0.0;
                    }
                }
            }
            PotentialKind::ImportanceDensity(d) | PotentialKind::Combined { density: d, .. } => {
                let rng_dyn: &mut dyn RngCore = rng;
                for (next, &s) in proposed.iter_mut().zip(&current) {
                    *next = d.sample(s, iv, rng_dyn);
                }
            }
        }

        // Potentials.
        for m in 0..particles {
            if track_logs {
                weights[m] = bridge::no_hit_prob_log(current_log[m], proposed_log[m], iv)?;
                continue;
            }
            let x = TransitionParticle::new(n, current[m], proposed[m]);
            weights[m] = match kind {
                PotentialKind::Standard => potentials::eval_g_base(&x, iv, spec.monitoring)?,
                PotentialKind::TruncatedChain => potentials::eval_g_hat_with_phi(phi[m], &x, iv, spec.monitoring)?,
                _ => potentials::eval_potential(kind, &x, iv, n_steps, spec)?,
            };
        }
        let total: f64 = weights.iter().sum();
        if !total.is_finite() {
            return Err(Error::InvalidRatio(total));
        }
        if total <= 0.0 {
            // Every particle left the window: the estimate is null.
            return Ok(PriceEstimate {
                price: 0.0,
                stderr: None,
                particles,
                steps: n_steps,
                method,
                psi: twist.is_none().then_some(0.0),
                degenerate: true,
                seconds: start.elapsed().as_secs_f64(),
            });
        }
        gamma *= total / m_f;

        // Selection.
        let last = n + 1 == n_steps;
        rejected.clear();
        if kind.is_bounded() {
            if indicator_only {
                rejected.extend((0..particles).filter(|&m| weights[m] == 0.0));
            } else {
                for m in 0..particles {
                    let u: f64 = rng.gen();
                    if weights[m] == 0.0 || u > weights[m] {
                        rejected.push(m);
                    }
                }
            }
        } else if !(twist.is_some() && last) {
            rejected.extend(0..particles);
        }

        if !rejected.is_empty() {
            resampler::cumulative_weights_into(&weights, total, &mut cumulative).ok_or(Error::DegenerateSupport)?;
            resampler::resample_indices_into(&cumulative, rejected.len(), rng, &mut uniforms, &mut picks);
            let moved = if track_logs { &mut proposed_log } else { &mut proposed };
            // Read every source before overwriting: a rejected slot can also be a source.
            for (value, &k) in scratch.iter_mut().zip(&picks) {
                *value = moved[k];
            }
            for (&slot, &value) in rejected.iter().zip(&scratch) {
                moved[slot] = value;
            }
        }
        if track_logs && (last || observe.is_some()) {
            for (s, &y) in proposed.iter_mut().zip(&proposed_log) {
                *s = y.exp();
            }
        }
        debug_assert!(!kind.is_bounded() || !(last || observe.is_some()) || proposed.iter().all(|&s| iv.contains(s)));

        if let Some(f) = observe.as_mut() {
            f(&ParticleEnsemble {
                step: n,
                starts: &current,
                potentials: &weights,
                rejected: rejected.len(),
                endpoints: &proposed,
            });
        }
        std::mem::swap(&mut current, &mut proposed);
        std::mem::swap(&mut current_log, &mut proposed_log);
    }

    let disc = term.discount_factor();
    let price = match twist {
        Some(t) => disc * potentials::twist_value(t, 0, n_steps, spec.spot, spec)? * gamma,
        None => disc * gamma * current.iter().map(|&s| potentials::eval_h(s, spec)).sum::<f64>() / m_f,
    };
    Ok(PriceEstimate {
        price,
        stderr: None,
        particles,
        steps: n_steps,
        method,
        psi: twist.is_none().then_some(gamma),
        degenerate: false,
        seconds: start.elapsed().as_secs_f64(),
    })
}

/// Prices a knock-out option with `method`. Drift shift of the importance
/// proposal is taken as 0 here; use [`price_smc`] with an explicit kind
/// for other proposals.
pub fn price<R: Rng>(
    spec: &OptionSpec,
    term: &MarketTermStructure,
    method: Method,
    particles: usize,
    rng: &mut R,
) -> Result<PriceEstimate> {
    match method {
        Method::Mc => price_mc(spec, term, particles, rng),
        _ => price_smc(spec, term, particles, &method.potential_kind(0.0), rng),
    }
}

/// Knock-in price as vanilla minus knock-out.
///
/// With [`Method::Mc`] both legs come from the same paths and the standard
/// error is taken from the paired differences. Particle methods price the
/// vanilla leg with the same estimator on the barrier-free market, starting
/// from a copy of the RNG (common random numbers); no single-run standard
/// error is available then.
pub fn price_knock_in<R: Rng + Clone>(
    spec: &OptionSpec,
    term: &MarketTermStructure,
    method: Method,
    particles: usize,
    rng: &mut R,
) -> Result<PriceEstimate> {
    let start = Instant::now();
    if spec.direction != Direction::KnockIn {
        return Err(Error::InvalidInput("price_knock_in needs a knock-in option".into()));
    }
    ensure_sample_size(particles)?;
    let ko_spec = spec.knock_out();
    let vanilla_term = term.without_barriers();

    // Knocked in at inception: the option is the vanilla.
    let knocked_in = !spot_inside(spec, term);

    let mut est = if method == Method::Mc {
        let mut moments = Moments::default();
        simulate_paths(&ko_spec, term, particles, rng, |payoff, weight, _| {
            let weight = if knocked_in { 0.0 } else { weight };
            moments.push(payoff * (1.0 - weight));
        })?;
        PriceEstimate {
            price: moments.mean,
            stderr: Some(moments.stderr()),
            particles,
            steps: term.steps(),
            method,
            psi: None,
            degenerate: false,
            seconds: 0.0,
        }
    } else {
        let mut vanilla_rng = rng.clone();
        let vanilla = price(&ko_spec, &vanilla_term, method, particles, &mut vanilla_rng)?;
        let knock_out = if knocked_in {
            0.0
        } else {
            price(&ko_spec, term, method, particles, rng)?.price
        };
        PriceEstimate {
            price: vanilla.price - knock_out,
            stderr: None,
            particles,
            steps: term.steps(),
            method,
            psi: None,
            degenerate: false,
            seconds: 0.0,
        }
    };
    est.seconds = start.elapsed().as_secs_f64();
    Ok(est)
}

/// Probability that the asset survives the barrier condition to maturity,
/// estimated from `paths` plain paths: the share of paths inside every window
/// at grid dates (discrete monitoring) or the mean of `prod_n G_n`
/// (continuous monitoring).
pub fn estimate_psi<R: Rng + ?Sized>(
    spec: &OptionSpec,
    term: &MarketTermStructure,
    paths: usize,
    rng: &mut R,
) -> Result<f64> {
    if paths == 0 {
        return Err(Error::InvalidInput("need at least 1 path".into()));
    }
    if !spot_inside(spec, term) {
        return Ok(0.0);
    }
    let intervals = term.intervals();
    let mut total = 0.0;
    for _ in 0..paths {
        let mut s = spec.spot;
        let mut weight = 1.0;
        for iv in intervals {
            let z: f64 = rng.sample(StandardNormal);
            let next = model::step_gbm(s, iv, z);
            if weight > 0.0 {
                weight *= match spec.monitoring {
                    Monitoring::Discrete => potentials::eval_g_discrete(&TransitionParticle::new(0, s, next), iv),
                    Monitoring::Continuous => potentials::eval_g_continuous(&TransitionParticle::new(0, s, next), iv)?,
                };
            }
            s = next;
        }
        total += weight;
    }
    Ok(total / paths as f64)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::PayoffKind;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn setup(n: usize, monitoring: Monitoring) -> (OptionSpec, MarketTermStructure) {
        let spec = OptionSpec::new(PayoffKind::Call, 100.0, 100.0, monitoring).unwrap();
        let term = MarketTermStructure::uniform(n, 0.5, 0.1, 0.0, 0.3, 90.0, 110.0).unwrap();
        (spec, term)
    }

    #[test]
    fn method_names_round_trip() {
        for m in Method::ALL {
            assert_eq!(m.as_str().parse::<Method>().unwrap(), m);
        }
        assert!("smc2".parse::<Method>().is_err());
    }

    #[test]
    fn spot_outside_window_prices_zero_without_simulation() {
        let (mut spec, term) = setup(4, Monitoring::Discrete);
        spec.spot = 120.0;
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let before = rng.clone();
        let mc = price_mc(&spec, &term, 100, &mut rng).unwrap();
        let smc = price_smc(&spec, &term, 100, &PotentialKind::Standard, &mut rng).unwrap();
        assert_eq!(mc.price, 0.0);
        assert_eq!(smc.price, 0.0);
        assert_eq!(rng, before);
    }

    #[test]
    fn sample_size_and_direction_are_checked() {
        let (spec, term) = setup(4, Monitoring::Discrete);
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        assert!(price_mc(&spec, &term, 1, &mut rng).is_err());
        assert!(price_smc(&spec, &term, 1, &PotentialKind::Standard, &mut rng).is_err());
        assert!(price_mc(&spec.knock_in(), &term, 10, &mut rng).is_err());
        assert!(price_knock_in(&spec, &term, Method::Mc, 10, &mut rng).is_err());
    }

    #[test]
    fn all_particles_exiting_gives_null_estimate() {
        // Window far narrower than one step's spread: every particle exits.
        let spec = OptionSpec::new(PayoffKind::Call, 100.0, 100.0, Monitoring::Discrete).unwrap();
        let term = MarketTermStructure::uniform(2, 0.5, 0.1, 0.0, 0.3, 99.999_999, 100.000_001).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let est = price_smc(&spec, &term, 50, &PotentialKind::Standard, &mut rng).unwrap();
        assert!(est.degenerate);
        assert_eq!(est.price, 0.0);
        assert_eq!(est.psi, Some(0.0));
    }

    #[test]
    fn same_seed_same_price() {
        for monitoring in [Monitoring::Continuous, Monitoring::Discrete] {
            let (spec, term) = setup(8, monitoring);
            for method in Method::ALL {
                let a = price(&spec, &term, method, 500, &mut ChaCha8Rng::seed_from_u64(42)).unwrap();
                let b = price(&spec, &term, method, 500, &mut ChaCha8Rng::seed_from_u64(42)).unwrap();
                assert_eq!(a.price.to_bits(), b.price.to_bits(), "{method}");
            }
        }
    }

    #[test]
    fn population_size_is_conserved_and_stays_inside() {
        let (spec, term) = setup(16, Monitoring::Continuous);
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let mut seen = 0;
        for kind in [PotentialKind::Standard, PotentialKind::TruncatedChain] {
            price_smc_observed(&spec, &term, 300, &kind, &mut rng, |ens| {
                assert_eq!(ens.endpoints.len(), 300);
                assert_eq!(ens.potentials.len(), 300);
                assert!(ens.endpoints.iter().all(|&s| s > 90.0 && s < 110.0));
                assert!(ens.potentials.iter().all(|&g| (0.0..=1.0).contains(&g)));
                seen += 1;
            })
            .unwrap();
        }
        assert_eq!(seen, 32);
    }

    #[test]
    fn no_barrier_particle_run_is_plain_mc() {
        let spec = OptionSpec::new(PayoffKind::Call, 100.0, 100.0, Monitoring::Discrete).unwrap();
        let term = MarketTermStructure::uniform(4, 0.5, 0.1, 0.0, 0.3, 0.0, f64::INFINITY).unwrap();
        let smc = price_smc(&spec, &term, 1000, &PotentialKind::Standard, &mut ChaCha8Rng::seed_from_u64(9)).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        // Same normals, particle-major within each step instead of path-major.
        let mut s = vec![100.0; 1000];
        for iv in term.intervals() {
            for x in s.iter_mut() {
                let z: f64 = rng.sample(StandardNormal);
                *x = model::step_gbm(*x, iv, z);
            }
        }
        let want = term.discount_factor() * s.iter().map(|&x| (x - 100.0).max(0.0)).sum::<f64>() / 1000.0;
        assert!((smc.price - want).abs() < 1e-12);
        assert_eq!(smc.psi, Some(1.0));
    }

    #[test]
    fn knock_in_without_barriers_is_worthless() {
        let spec = OptionSpec::new(PayoffKind::Call, 100.0, 100.0, Monitoring::Continuous)
            .unwrap()
            .knock_in();
        let term = MarketTermStructure::uniform(4, 0.5, 0.1, 0.0, 0.3, 0.0, f64::INFINITY).unwrap();
        for method in [Method::Mc, Method::Smc] {
            let est = price_knock_in(&spec, &term, method, 2000, &mut ChaCha8Rng::seed_from_u64(2)).unwrap();
            assert!(est.price.abs() < 1e-12, "{method}: {}", est.price);
        }
    }

    #[test]
    fn psi_without_barriers_is_one() {
        let spec = OptionSpec::new(PayoffKind::Call, 100.0, 100.0, Monitoring::Continuous).unwrap();
        let term = MarketTermStructure::uniform(4, 0.5, 0.1, 0.0, 0.3, 0.0, f64::INFINITY).unwrap();
        assert_eq!(estimate_psi(&spec, &term, 100, &mut ChaCha8Rng::seed_from_u64(1)).unwrap(), 1.0);
    }
}
