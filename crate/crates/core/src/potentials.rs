//! Feynman-Kac potential functions evaluated on transition particles.
//!
//! A transition particle `X_n = (S_n, S_{n+1})` carries one grid interval of a
//! path. The price of a knock-out option is the discounted expectation of the
//! terminal payoff times the product of the potentials along the path, so each
//! family below is one way of splitting that product:
//!
//! * standard: `g(S_n, S_{n+1}) 1{S_{n+1} in window}` (continuous monitoring)
//!   or the bare indicator (discrete monitoring);
//! * truncated chain: `phi(S_n) g(S_n, S_{n+1})` for a chain that never leaves
//!   the window at grid dates;
//! * importance density: standard potential times `f / f_bar` when particles
//!   move under a proposal density `f_bar`;
//! * payoff twist: standard potential times `h_{n+1}(S_{n+1}) / h_n(S_n)`.

use std::fmt::Debug;
use std::sync::Arc;

use rand::RngCore;
use rand_distr::{Distribution, StandardNormal};

use crate::bridge::{self, BridgeQuery};
use crate::error::{Error, Result};
use crate::model::{self, Interval, Monitoring, OptionSpec};
use crate::normal;

/// One interval of a simulated path. `step` is the zero-based interval index.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TransitionParticle {
    pub step: usize,
    pub s_prev: f64,
    pub s_next: f64,
}

impl TransitionParticle {
    #[inline]
    pub fn new(step: usize, s_prev: f64, s_next: f64) -> Self {
        TransitionParticle { step, s_prev, s_next }
    }
}

/// A proposal transition density `f_bar(s_next | s_prev)` supplied as a sampler
/// together with its log-density.
pub trait ProposalDensity: Debug + Send + Sync {
    fn sample(&self, s_prev: f64, interval: &Interval, rng: &mut dyn RngCore) -> f64;
    fn ln_density(&self, s_next: f64, s_prev: f64, interval: &Interval) -> f64;
}

/// Lognormal proposal whose log drift is shifted by `shift` per year.
/// A shift of zero reproduces the model transition.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DriftShift {
    pub shift: f64,
}

impl ProposalDensity for DriftShift {
    fn sample(&self, s_prev: f64, interval: &Interval, rng: &mut dyn RngCore) -> f64 {
        let z: f64 = StandardNormal.sample(rng);
        s_prev * (interval.log_mean() + self.shift * interval.dt + interval.log_std() * z).exp()
    }

    fn ln_density(&self, s_next: f64, s_prev: f64, interval: &Interval) -> f64 {
        lognormal_ln_density(s_next, s_prev, interval.log_mean() + self.shift * interval.dt, interval.log_std())
    }
}

/// Positive intermediate functions `h_0, ..., h_{N-1}` of the payoff twist.
/// The terminal function `h_N` is always the option payoff.
pub trait PayoffTwist: Debug + Send + Sync {
    fn intermediate(&self, step: usize, s: f64, spec: &OptionSpec) -> f64;
}

/// `h_n = h + 1` for every `n < N`.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct PayoffPlusOne;

impl PayoffTwist for PayoffPlusOne {
    fn intermediate(&self, _step: usize, s: f64, spec: &OptionSpec) -> f64 {
        spec.payoff_at(s) + 1.0
    }
}

/// `h_n = c` for every `n < N`; the twisted product telescopes to `h / c`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ConstantTwist(pub f64);

impl PayoffTwist for ConstantTwist {
    fn intermediate(&self, _step: usize, _s: f64, _spec: &OptionSpec) -> f64 {
        self.0
    }
}

/// Which potential family drives an estimator run. The continuous or discrete
/// flavour of the base potential comes from [`OptionSpec::monitoring`].
#[derive(Debug, Clone)]
pub enum PotentialKind {
    /// `G_n` (continuous) or the indicator `G~_n` (discrete) on the plain chain.
    Standard,
    /// `G^_n = phi_n g` on the chain conditioned to stay in the window at grid dates.
    TruncatedChain,
    /// Standard potential times `f / f_bar`, particles move under `f_bar`.
    ImportanceDensity(Arc<dyn ProposalDensity>),
    /// Standard potential times `h_{n+1} / h_n`.
    PayoffTwist(Arc<dyn PayoffTwist>),
    /// Both twists at once. Experimental: only mean preservation is tested.
    Combined {
        density: Arc<dyn ProposalDensity>,
        twist: Arc<dyn PayoffTwist>,
    },
}

impl PotentialKind {
    /// Potentials of bounded kinds lie in `[0, 1]` and allow accept/reject selection.
    pub fn is_bounded(&self) -> bool {
        matches!(self, PotentialKind::Standard | PotentialKind::TruncatedChain)
    }

    pub fn density(&self) -> Option<&dyn ProposalDensity> {
        match self {
            PotentialKind::ImportanceDensity(d) | PotentialKind::Combined { density: d, .. } => Some(d.as_ref()),
            _ => None,
        }
    }

    pub fn twist(&self) -> Option<&dyn PayoffTwist> {
        match self {
            PotentialKind::PayoffTwist(t) | PotentialKind::Combined { twist: t, .. } => Some(t.as_ref()),
            _ => None,
        }
    }
}

/// `ln f(s_next | s_prev)` for a lognormal step with log mean `mean`, log std `std`.
#[inline]
pub fn lognormal_ln_density(s_next: f64, s_prev: f64, mean: f64, std: f64) -> f64 {
    let z = ((s_next / s_prev).ln() - mean) / std;
    normal::ln_pdf(z) - std.ln() - s_next.ln()
}

/// Model transition log-density over `interval`.
#[inline]
pub fn model_ln_density(s_next: f64, s_prev: f64, interval: &Interval) -> f64 {
    lognormal_ln_density(s_next, s_prev, interval.log_mean(), interval.log_std())
}

/// Continuous-monitoring potential: window indicator times bridge no-hit probability.
#[inline]
pub fn eval_g_continuous(x: &TransitionParticle, interval: &Interval) -> Result<f64> {
    if !interval.contains(x.s_next) {
        return Ok(0.0);
    }
    bridge::no_hit_prob(&BridgeQuery::new(x.s_prev, x.s_next, interval))
}

/// Discrete-monitoring potential: indicator of the open window.
#[inline]
pub fn eval_g_discrete(x: &TransitionParticle, interval: &Interval) -> f64 {
    if interval.contains(x.s_next) {
        1.0
    } else {
        0.0
    }
}

#[inline]
pub fn eval_g_base(x: &TransitionParticle, interval: &Interval, monitoring: Monitoring) -> Result<f64> {
    match monitoring {
        Monitoring::Continuous => eval_g_continuous(x, interval),
        Monitoring::Discrete => Ok(eval_g_discrete(x, interval)),
    }
}

/// Truncated-chain potential `phi(s_prev) * g(s_prev, s_next)`; `g = 1` under
/// discrete monitoring.
#[inline]
pub fn eval_g_hat(x: &TransitionParticle, interval: &Interval, monitoring: Monitoring) -> Result<f64> {
    let phi = model::survival_prob_phi(x.s_prev, interval);
    eval_g_hat_with_phi(phi, x, interval, monitoring)
}

/// [`eval_g_hat`] with a precomputed survival probability of `x.s_prev`.
#[inline]
pub fn eval_g_hat_with_phi(phi: f64, x: &TransitionParticle, interval: &Interval, monitoring: Monitoring) -> Result<f64> {
    if phi == 0.0 {
        return Ok(0.0);
    }
    Ok(phi * eval_g_base(x, interval, monitoring)?)
}

/// `f(s_next | s_prev) / f_bar(s_next | s_prev)`.
pub fn density_ratio(x: &TransitionParticle, interval: &Interval, density: &dyn ProposalDensity) -> Result<f64> {
    let ln_ratio = model_ln_density(x.s_next, x.s_prev, interval) - density.ln_density(x.s_next, x.s_prev, interval);
    let ratio = ln_ratio.exp();
    if ratio.is_finite() && ratio >= 0.0 {
        Ok(ratio)
    } else {
        Err(Error::InvalidRatio(ratio))
    }
}

/// Importance-density potential: base potential times the density ratio. Not bounded by 1.
pub fn eval_g_importance(
    x: &TransitionParticle,
    interval: &Interval,
    monitoring: Monitoring,
    density: &dyn ProposalDensity,
) -> Result<f64> {
    let ratio = density_ratio(x, interval, density)?;
    let base = eval_g_base(x, interval, monitoring)?;
    Ok(base * ratio)
}

/// `h_step(s)`: the intermediate twist below maturity, the payoff at step `n_steps`.
pub fn twist_value(twist: &dyn PayoffTwist, step: usize, n_steps: usize, s: f64, spec: &OptionSpec) -> Result<f64> {
    if step >= n_steps {
        return Ok(spec.payoff_at(s));
    }
    let h = twist.intermediate(step, s, spec);
    if h > 0.0 && h.is_finite() {
        Ok(h)
    } else {
        Err(Error::InvalidTwist { step, value: s, h })
    }
}

/// `h_{n+1}(s_next) / h_n(s_prev)` for the particle on interval `n = x.step`.
pub fn twist_ratio(x: &TransitionParticle, n_steps: usize, spec: &OptionSpec, twist: &dyn PayoffTwist) -> Result<f64> {
    let num = twist_value(twist, x.step + 1, n_steps, x.s_next, spec)?;
    let den = twist_value(twist, x.step, n_steps, x.s_prev, spec)?;
    Ok(num / den)
}

/// Payoff-twisted potential: base potential times `h_{n+1} / h_n`.
pub fn eval_g_payoff_twist(
    x: &TransitionParticle,
    interval: &Interval,
    n_steps: usize,
    spec: &OptionSpec,
    twist: &dyn PayoffTwist,
) -> Result<f64> {
    let base = eval_g_base(x, interval, spec.monitoring)?;
    if base == 0.0 {
        return Ok(0.0);
    }
    Ok(base * twist_ratio(x, n_steps, spec, twist)?)
}

/// Extended payoff `H(S_N, S_{N+1}) = h(S_N)` on the terminal asset value.
#[inline]
pub fn eval_h(s_terminal: f64, spec: &OptionSpec) -> f64 {
    spec.payoff_at(s_terminal)
}

/// Potential of `kind` for particle `x`.
pub fn eval_potential(
    kind: &PotentialKind,
    x: &TransitionParticle,
    interval: &Interval,
    n_steps: usize,
    spec: &OptionSpec,
) -> Result<f64> {
    match kind {
        PotentialKind::Standard => eval_g_base(x, interval, spec.monitoring),
        PotentialKind::TruncatedChain => eval_g_hat(x, interval, spec.monitoring),
        PotentialKind::ImportanceDensity(d) => eval_g_importance(x, interval, spec.monitoring, d.as_ref()),
        PotentialKind::PayoffTwist(t) => eval_g_payoff_twist(x, interval, n_steps, spec, t.as_ref()),
        PotentialKind::Combined { density, twist } => {
            let g = eval_g_importance(x, interval, spec.monitoring, density.as_ref())?;
            if g == 0.0 {
                return Ok(0.0);
            }
            Ok(g * twist_ratio(x, n_steps, spec, twist.as_ref())?)
        }
    }
}
