//! Market and option data, and exact one-step transitions of the asset.
//!
//! Everything is piecewise constant on a time grid `0 = t_0 < t_1 < ... < t_N = T`.
//! Interval `n` (zero based here) covers `[t_n, t_{n+1}]` and carries its own
//! drift, volatility, short rate and barrier window `(lower, upper)`. A lower
//! barrier of `0` and an upper barrier of `+inf` mean "no barrier".

use crate::error::{Error, Result};
use crate::normal;

/// Parameters of one grid interval.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Interval {
    /// Length of the interval in years.
    pub dt: f64,
    /// Risk-neutral drift `r - q` (1/yr).
    pub drift: f64,
    /// Volatility (1/sqrt(yr)), strictly positive.
    pub sigma: f64,
    /// Short rate used for discounting (1/yr).
    pub rate: f64,
    /// Lower barrier, `0` if absent.
    pub lower: f64,
    /// Upper barrier, `+inf` if absent.
    pub upper: f64,
    // Cached log-step mean `(drift - sigma^2/2) dt`, std `sigma sqrt(dt)` and
    // log barriers (`-inf` / `+inf` when absent).
    log_mean: f64,
    log_std: f64,
    ln_lower: f64,
    ln_upper: f64,
}

impl Interval {
    pub fn new(dt: f64, drift: f64, sigma: f64, rate: f64, lower: f64, upper: f64) -> Result<Self> {
        if !(dt > 0.0 && dt.is_finite()) {
            return Err(Error::InvalidInput(format!("interval length must be > 0, got {dt}")));
        }
        if !(sigma > 0.0 && sigma.is_finite()) {
            return Err(Error::InvalidInput(format!("volatility must be > 0, got {sigma}")));
        }
        if !drift.is_finite() || !rate.is_finite() {
            return Err(Error::InvalidInput("drift and rate must be finite".into()));
        }
        if !(lower >= 0.0) || lower.is_infinite() {
            return Err(Error::InvalidInput(format!("lower barrier must be finite and >= 0, got {lower}")));
        }
        if !(lower < upper) {
            return Err(Error::InvalidInput(format!(
                "lower barrier {lower} must be below upper barrier {upper}"
            )));
        }
        Ok(Interval {
            dt,
            drift,
            sigma,
            rate,
            lower,
            upper,
            log_mean: (drift - 0.5 * sigma * sigma) * dt,
            log_std: sigma * dt.sqrt(),
            ln_lower: lower.ln(),
            ln_upper: upper.ln(),
        })
    }

    /// Mean of the log increment over the interval.
    #[inline]
    pub fn log_mean(&self) -> f64 {
        self.log_mean
    }

    /// Standard deviation of the log increment over the interval.
    #[inline]
    pub fn log_std(&self) -> f64 {
        self.log_std
    }

    /// `ln(lower)`, `-inf` without a lower barrier.
    #[inline]
    pub fn ln_lower(&self) -> f64 {
        self.ln_lower
    }

    /// `ln(upper)`, `+inf` without an upper barrier.
    #[inline]
    pub fn ln_upper(&self) -> f64 {
        self.ln_upper
    }

    /// Bridge variance `sigma^2 dt`.
    #[inline]
    pub fn variance(&self) -> f64 {
        self.log_std * self.log_std
    }

    /// True if `s` lies strictly inside `(lower, upper)`.
    #[inline]
    pub fn contains(&self, s: f64) -> bool {
        s > self.lower && s < self.upper
    }

    #[inline]
    pub fn has_lower(&self) -> bool {
        self.lower > 0.0
    }

    #[inline]
    pub fn has_upper(&self) -> bool {
        self.upper.is_finite()
    }

    /// Standardised truncation bounds `(A, B)` of the Gaussian driver given the
    /// previous asset value. Absent barriers map to infinite bounds.
    #[inline]
    pub fn truncation_bounds(&self, s_prev: f64) -> (f64, f64) {
        let a = if self.has_lower() {
            ((self.lower / s_prev).ln() - self.log_mean) / self.log_std
        } else {
            f64::NEG_INFINITY
        };
        let b = if self.has_upper() {
            ((self.upper / s_prev).ln() - self.log_mean) / self.log_std
        } else {
            f64::INFINITY
        };
        (a, b)
    }

    /// Copy of this interval with both barriers removed.
    pub fn without_barriers(&self) -> Interval {
        Interval {
            lower: 0.0,
            upper: f64::INFINITY,
            ln_lower: f64::NEG_INFINITY,
            ln_upper: f64::INFINITY,
            ..*self
        }
    }
}

/// Piecewise-constant market data and barriers on a time grid.
#[derive(Debug, Clone, PartialEq)]
pub struct MarketTermStructure {
    times: Vec<f64>,
    intervals: Vec<Interval>,
}

impl MarketTermStructure {
    /// Builds a term structure from grid times `t_0 = 0 < ... < t_N` and one
    /// [`Interval`] per grid interval. The interval lengths are taken from the grid.
    pub fn new(times: Vec<f64>, intervals: Vec<Interval>) -> Result<Self> {
        if times.len() < 2 {
            return Err(Error::InvalidInput("time grid needs at least two points".into()));
        }
        if times[0] != 0.0 {
            return Err(Error::InvalidInput("time grid must start at 0".into()));
        }
        if times.windows(2).any(|w| !(w[1] > w[0])) {
            return Err(Error::InvalidInput("time grid must be strictly increasing".into()));
        }
        if intervals.len() != times.len() - 1 {
            return Err(Error::InvalidInput(format!(
                "{} grid intervals but {} interval parameter sets",
                times.len() - 1,
                intervals.len()
            )));
        }
        let intervals = intervals
            .iter()
            .zip(times.windows(2))
            .map(|(iv, w)| Interval::new(w[1] - w[0], iv.drift, iv.sigma, iv.rate, iv.lower, iv.upper))
            .collect::<Result<Vec<_>>>()?;
        Ok(MarketTermStructure { times, intervals })
    }

    /// `n` equal steps over `[0, maturity]` with constant parameters and barriers.
    pub fn uniform(
        n: usize,
        maturity: f64,
        rate: f64,
        dividend: f64,
        sigma: f64,
        lower: f64,
        upper: f64,
    ) -> Result<Self> {
        if n == 0 {
            return Err(Error::InvalidInput("number of steps must be >= 1".into()));
        }
        if !(maturity > 0.0) {
            return Err(Error::InvalidInput(format!("maturity must be > 0, got {maturity}")));
        }
        let times: Vec<f64> = (0..=n).map(|i| maturity * i as f64 / n as f64).collect();
        let dt = maturity / n as f64;
        let iv = Interval::new(dt, rate - dividend, sigma, rate, lower, upper)?;
        MarketTermStructure::new(times, vec![iv; n])
    }

    /// Number of intervals `N`.
    pub fn steps(&self) -> usize {
        self.intervals.len()
    }

    pub fn times(&self) -> &[f64] {
        &self.times
    }

    pub fn intervals(&self) -> &[Interval] {
        &self.intervals
    }

    pub fn interval(&self, n: usize) -> &Interval {
        &self.intervals[n]
    }

    pub fn maturity(&self) -> f64 {
        *self.times.last().expect("grid is non-empty")
    }

    /// `exp(-sum r_n dt_n)`
    pub fn discount_factor(&self) -> f64 {
        (-self.intervals.iter().map(|iv| iv.rate * iv.dt).sum::<f64>()).exp()
    }

    /// Same grid and parameters with every barrier removed.
    pub fn without_barriers(&self) -> MarketTermStructure {
        MarketTermStructure {
            times: self.times.clone(),
            intervals: self.intervals.iter().map(Interval::without_barriers).collect(),
        }
    }

    /// True if no interval carries a barrier.
    pub fn is_barrier_free(&self) -> bool {
        self.intervals.iter().all(|iv| !iv.has_lower() && !iv.has_upper())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum PayoffKind {
    Call,
    Put,
}

/// Whether the barrier applies to the whole path or only at grid dates.
#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Monitoring {
    Continuous,
    Discrete,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Direction {
    KnockOut,
    KnockIn,
}

/// Contract terms of a barrier option. Barriers and maturity live in the
/// [`MarketTermStructure`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OptionSpec {
    pub payoff: PayoffKind,
    pub strike: f64,
    pub spot: f64,
    pub monitoring: Monitoring,
    pub direction: Direction,
}

impl OptionSpec {
    pub fn new(payoff: PayoffKind, strike: f64, spot: f64, monitoring: Monitoring) -> Result<Self> {
        if !(strike > 0.0 && strike.is_finite()) {
            return Err(Error::InvalidInput(format!("strike must be > 0, got {strike}")));
        }
        if !(spot > 0.0 && spot.is_finite()) {
            return Err(Error::InvalidInput(format!("spot must be > 0, got {spot}")));
        }
        Ok(OptionSpec {
            payoff,
            strike,
            spot,
            monitoring,
            direction: Direction::KnockOut,
        })
    }

    pub fn knock_in(self) -> Self {
        OptionSpec {
            direction: Direction::KnockIn,
            ..self
        }
    }

    pub fn knock_out(self) -> Self {
        OptionSpec {
            direction: Direction::KnockOut,
            ..self
        }
    }

    /// Vanilla payoff `h` at maturity.
    #[inline]
    pub fn payoff_at(&self, s: f64) -> f64 {
        match self.payoff {
            PayoffKind::Call => (s - self.strike).max(0.0),
            PayoffKind::Put => (self.strike - s).max(0.0),
        }
    }
}

/// Asset value at grid date `step`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PathState {
    pub step: usize,
    pub value: f64,
}

/// Exact GBM transition over `interval` driven by the standard normal draw `z`.
#[inline]
pub fn step_gbm(s_prev: f64, interval: &Interval, z: f64) -> f64 {
    s_prev * (interval.log_mean + interval.log_std * z).exp()
}

/// `Pr(S_next in (lower, upper) | S_prev = s_prev)`, zero on underflow.
#[inline]
pub fn survival_prob_phi(s_prev: f64, interval: &Interval) -> f64 {
    let (a, b) = interval.truncation_bounds(s_prev);
    normal::interval_prob(a, b)
}

/// One step of the chain conditioned to land inside the barrier window,
/// sampled by inverse transform of the truncated Gaussian driver with the
/// uniform draw `u` in `[0, 1)`.
///
/// `interval_index` is only used for error reporting.
pub fn step_truncated_chain(s_prev: f64, interval: &Interval, interval_index: usize, u: f64) -> Result<f64> {
    let s = truncated_step_with_phi(s_prev, interval, u)
        .1
        .ok_or(Error::DegenerateWindow {
            interval: interval_index,
        })?;
    debug_assert!(interval.contains(s));
    Ok(s)
}

/// Survival probability of `s_prev` together with one truncated-chain step
/// driven by `u`. The step is `None` when the survival probability is zero.
#[inline]
pub fn truncated_step_with_phi(s_prev: f64, interval: &Interval, u: f64) -> (f64, Option<f64>) {
    let (a, b) = interval.truncation_bounds(s_prev);
    let phi = normal::interval_prob(a, b);
    if phi == 0.0 {
        return (0.0, None);
    }
    let step = truncated_normal_inverse(a, b, u).map(|z| {
        let s = step_gbm(s_prev, interval, z);
        // Rounding in exp/ln can put a draw from the window edge onto the barrier.
        if s <= interval.lower {
            interval.lower.next_up()
        } else if s >= interval.upper {
            interval.upper.next_down()
        } else {
            s
        }
    });
    (phi, step)
}

/// Inverse CDF of the standard normal restricted to `(a, b)` at level `u`.
/// Returns `None` if the window carries no numerically representable mass.
pub(crate) fn truncated_normal_inverse(a: f64, b: f64, u: f64) -> Option<f64> {
    // Work in the lower tail, where Phi keeps its relative precision.
    if a > 0.0 {
        return truncated_normal_inverse(-b, -a, 1.0 - u).map(|z| -z);
    }
    let lo = normal::cdf(a);
    let hi = normal::cdf(b);
    let mass = hi - lo;
    if !(mass > 0.0) {
        return None;
    }
    let z = normal::inv_cdf(lo + u * mass);
    Some(z.clamp(a, b))
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;
    use rand_distr::StandardNormal;

    fn iv(lower: f64, upper: f64) -> Interval {
        Interval::new(0.5, 0.1, 0.3, 0.1, lower, upper).unwrap()
    }

    #[test]
    fn zero_noise_step_is_deterministic_drift() {
        let s = step_gbm(100.0, &iv(0.0, f64::INFINITY), 0.0);
        assert!((s - 100.0 * 0.0275f64.exp()).abs() < 1e-12);
    }

    #[test]
    fn antithetic_product() {
        let i = iv(0.0, f64::INFINITY);
        for z in [0.1, 1.7, -2.3] {
            let prod = step_gbm(100.0, &i, z) * step_gbm(100.0, &i, -z);
            let want = 100.0 * 100.0 * (2.0 * (0.1 - 0.045) * 0.5f64).exp();
            assert!((prod / want - 1.0).abs() < 1e-14);
        }
    }

    #[test]
    fn discounted_step_is_a_martingale() {
        let i = iv(0.0, f64::INFINITY);
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let n = 1_000_000;
        let (mut sum, mut sum2) = (0.0, 0.0);
        for _ in 0..n {
            let s = step_gbm(100.0, &i, rng.sample(StandardNormal));
            sum += s;
            sum2 += s * s;
        }
        let mean = sum / n as f64;
        let se = ((sum2 / n as f64 - mean * mean) / n as f64).sqrt();
        let want = 100.0 * (0.1f64 * 0.5).exp();
        assert!((mean - want).abs() < 3.0 * se, "mean {mean} want {want} se {se}");
    }

    #[test]
    fn truncated_chain_without_barriers_is_plain_gbm() {
        let i = iv(0.0, f64::INFINITY);
        for u in [1e-9, 0.1, 0.5, 0.93] {
            let s = step_truncated_chain(100.0, &i, 0, u).unwrap();
            let want = step_gbm(100.0, &i, normal::inv_cdf(u));
            assert!((s - want).abs() < 1e-12 * want);
        }
    }

    #[test]
    fn truncated_chain_midpoint_is_conditional_median() {
        // Window symmetric in log space around the median of the step.
        let base = iv(0.0, f64::INFINITY);
        let median = 100.0 * base.log_mean().exp();
        let half = 0.7 * base.log_std();
        let i = iv(median * (-half).exp(), median * half.exp());
        let s = step_truncated_chain(100.0, &i, 0, 0.5).unwrap();
        assert!((s - median).abs() < 1e-10 * median);
    }

    #[test]
    fn truncated_chain_respects_window_and_tails() {
        let i = iv(90.0, 110.0);
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for s_prev in [90.000001, 95.0, 109.99999] {
            for _ in 0..10_000 {
                let s = step_truncated_chain(s_prev, &i, 0, rng.gen()).unwrap();
                assert!(i.contains(s));
            }
        }
        // Far right tail: window sits ~14 std above the mean.
        let tiny = Interval::new(0.01, 0.0, 0.1, 0.0, 115.0, 116.0).unwrap();
        let s = step_truncated_chain(100.0, &tiny, 0, 0.5).unwrap();
        assert!(tiny.contains(s));
        assert!(s < 115.1);
        // Mass beyond floating point range.
        let dead = Interval::new(0.001, 0.0, 0.01, 0.0, 200.0, 300.0).unwrap();
        assert!(matches!(
            step_truncated_chain(100.0, &dead, 4, 0.5),
            Err(Error::DegenerateWindow { interval: 4 })
        ));
        assert_eq!(survival_prob_phi(100.0, &dead), 0.0);
    }

    #[test]
    fn survival_probability_edges_and_monotonicity() {
        assert_eq!(survival_prob_phi(100.0, &iv(0.0, f64::INFINITY)), 1.0);
        let narrow = Interval::new(1e-4, 0.0, 0.01, 0.0, 150.0, f64::INFINITY).unwrap();
        assert!(survival_prob_phi(100.0, &narrow) < 1e-300);
        let mut last = 0.0;
        for u in [101.0, 105.0, 110.0, 130.0, 1e6] {
            let p = survival_prob_phi(100.0, &iv(90.0, u));
            assert!(p >= last);
            last = p;
        }
        let mut last = 1.0;
        for l in [1.0, 80.0, 90.0, 99.0] {
            let p = survival_prob_phi(100.0, &iv(l, 110.0));
            assert!(p <= last);
            last = p;
        }
    }

    #[test]
    fn survival_probability_matches_sampling() {
        let i = iv(90.0, 110.0);
        let p = survival_prob_phi(100.0, &i);
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let n = 1_000_000;
        let hits = (0..n)
            .filter(|_| i.contains(step_gbm(100.0, &i, rng.sample(StandardNormal))))
            .count();
        let freq = hits as f64 / n as f64;
        let se = (p * (1.0 - p) / n as f64).sqrt();
        assert!((freq - p).abs() < 3.0 * se, "freq {freq} phi {p}");
    }

    #[test]
    fn term_structure_validation() {
        assert!(MarketTermStructure::uniform(0, 0.5, 0.1, 0.0, 0.3, 90.0, 110.0).is_err());
        assert!(MarketTermStructure::uniform(4, 0.5, 0.1, 0.0, -0.3, 90.0, 110.0).is_err());
        assert!(MarketTermStructure::uniform(4, 0.5, 0.1, 0.0, 0.3, 110.0, 90.0).is_err());
        let i = iv(90.0, 110.0);
        assert!(MarketTermStructure::new(vec![0.0, 0.3, 0.2], vec![i, i]).is_err());
        assert!(MarketTermStructure::new(vec![0.0, 0.3], vec![i, i]).is_err());
        let t = MarketTermStructure::uniform(8, 0.5, 0.1, 0.0, 0.3, 90.0, 110.0).unwrap();
        assert_eq!(t.steps(), 8);
        assert!((t.discount_factor() - (-0.05f64).exp()).abs() < 1e-15);
        assert!((t.interval(3).dt - 0.0625).abs() < 1e-15);
        assert!(t.without_barriers().is_barrier_free());
    }
}
