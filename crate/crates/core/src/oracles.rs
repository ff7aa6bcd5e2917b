//! Reference prices that do not share code with the simulation engine:
//! Black-Scholes, the constant-parameter double-barrier series, and a
//! deterministic quadrature of the nested price integral.

use crate::bridge::{self, BridgeQuery};
use crate::error::{Error, Result};
use crate::model::{Interval, MarketTermStructure, Monitoring, OptionSpec, PayoffKind};
use crate::normal;

/// A reference value with the accuracy it was computed to.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OraclePrice {
    pub value: f64,
    pub method: &'static str,
    /// Absolute error bound (series tolerance or refinement difference).
    pub accuracy: f64,
}

/// Constant market parameters over `[0, maturity]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FlatMarket {
    pub rate: f64,
    pub dividend: f64,
    pub sigma: f64,
    pub maturity: f64,
}

impl FlatMarket {
    fn validate(&self) -> Result<()> {
        if !(self.sigma > 0.0 && self.maturity > 0.0) {
            return Err(Error::InvalidInput("sigma and maturity must be > 0".into()));
        }
        Ok(())
    }
}

/// Black-Scholes value of the vanilla call or put.
pub fn vanilla_bs(spec: &OptionSpec, market: &FlatMarket) -> Result<OraclePrice> {
    market.validate()?;
    let FlatMarket { rate, dividend, sigma, maturity } = *market;
    let (s, k) = (spec.spot, spec.strike);
    let vol = sigma * maturity.sqrt();
    let d1 = ((s / k).ln() + (rate - dividend + 0.5 * sigma * sigma) * maturity) / vol;
    let d2 = d1 - vol;
    let df = (-rate * maturity).exp();
    let fwd = s * (-dividend * maturity).exp();
    let value = match spec.payoff {
        PayoffKind::Call => fwd * normal::cdf(d1) - k * df * normal::cdf(d2),
        PayoffKind::Put => k * df * normal::cdf(-d2) - fwd * normal::cdf(-d1),
    };
    Ok(OraclePrice {
        value,
        method: "black-scholes",
        accuracy: 1e-10,
    })
}

/// `int_a^b exp(lambda x) n_v(x - c) dx` with `n_v` the centred normal density of variance `v`.
fn gaussian_exp_integral(lambda: f64, c: f64, v: f64, a: f64, b: f64) -> f64 {
    if !(a < b) {
        return 0.0;
    }
    let sd = v.sqrt();
    let shift = c + lambda * v;
    let mass = normal::interval_prob((a - shift) / sd, (b - shift) / sd);
    if mass == 0.0 {
        return 0.0;
    }
    (lambda * c + 0.5 * lambda * lambda * v + mass.ln()).exp()
}

/// Price of a knock-out call or put with both barriers monitored continuously
/// and constant parameters, from the method-of-images series for the killed
/// log-price density. A lower barrier of 0 or an infinite upper barrier
/// removes that side. Terms are added in pairs `k, -k` until a pair
/// contributes less than `tol`.
pub fn double_barrier_closed_form(
    spec: &OptionSpec,
    market: &FlatMarket,
    lower: f64,
    upper: f64,
    tol: f64,
) -> Result<OraclePrice> {
    const MAX_TERMS: usize = 500;
    market.validate()?;
    if !(lower < upper && lower >= 0.0) {
        return Err(Error::InvalidInput(format!("need 0 <= lower < upper, got ({lower}, {upper})")));
    }
    let s0 = spec.spot;
    if !(s0 > lower && s0 < upper) {
        return Ok(OraclePrice {
            value: 0.0,
            method: "double-barrier-series",
            accuracy: 0.0,
        });
    }
    let FlatMarket { rate, dividend, sigma, maturity } = *market;
    let v = sigma * sigma * maturity;
    let nu = rate - dividend - 0.5 * sigma * sigma;
    let l = if lower > 0.0 { (lower / s0).ln() } else { f64::NEG_INFINITY };
    let u = if upper.is_finite() { (upper / s0).ln() } else { f64::INFINITY };
    let k = (spec.strike / s0).ln();
    // Payoff support in log-price.
    let (a, b) = match spec.payoff {
        PayoffKind::Call => (k.max(l), u),
        PayoffKind::Put => (l, k.min(u)),
    };
    let sign = match spec.payoff {
        PayoffKind::Call => 1.0,
        PayoffKind::Put => -1.0,
    };
    let lam = nu / (sigma * sigma);
    let drift_factor = (-nu * nu * maturity / (2.0 * sigma * sigma)).exp();
    // Discounted payoff integrated against one image density centred at c.
    let image = |c: f64| sign * (s0 * gaussian_exp_integral(lam + 1.0, c, v, a, b) - spec.strike * gaussian_exp_integral(lam, c, v, a, b));

    let mut total = image(0.0);
    let mut accuracy = 0.0;
    match (l.is_finite(), u.is_finite()) {
        (false, false) => {}
        (true, false) => total -= image(2.0 * l),
        (false, true) => total -= image(2.0 * u),
        (true, true) => {
            let w = u - l;
            total -= image(2.0 * u);
            let mut converged = false;
            let mut last = f64::INFINITY;
            for kk in 1..=MAX_TERMS {
                let s = 2.0 * kk as f64 * w;
                let pair = image(s) + image(-s) - image(2.0 * u - s) - image(2.0 * u + s);
                total += pair;
                last = pair.abs();
                if last < tol {
                    accuracy = last;
                    converged = true;
                    break;
                }
            }
            if !converged {
                return Err(Error::SeriesNotConverged {
                    tol,
                    max_terms: MAX_TERMS,
                    last,
                });
            }
        }
    }
    let value = (-rate * maturity).exp() * drift_factor * total;
    Ok(OraclePrice {
        value: value.max(0.0),
        method: "double-barrier-series",
        accuracy: accuracy.max(tol),
    })
}

/// Gauss-Legendre nodes and weights on `[-1, 1]`.
fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    let mut x = vec![0.0; n];
    let mut w = vec![0.0; n];
    for i in 0..n.div_ceil(2) {
        let mut z = (std::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (mut p0, mut p1) = (1.0, 0.0);
            for j in 0..n {
                let p2 = p1;
                p1 = p0;
                p0 = ((2 * j + 1) as f64 * z * p1 - j as f64 * p2) / (j + 1) as f64;
            }
            dp = n as f64 * (z * p0 - p1) / (z * z - 1.0);
            let dz = p0 / dp;
            z -= dz;
            if dz.abs() < 1e-15 {
                break;
            }
        }
        x[i] = -z;
        x[n - 1 - i] = z;
        w[i] = 2.0 / ((1.0 - z * z) * dp * dp);
        w[n - 1 - i] = w[i];
    }
    (x, w)
}

const GL_ORDER: usize = 8;

/// Composite Gauss-Legendre nodes on `[lo, hi]` with panels no wider than
/// `width`, splitting additionally at `breaks` inside the range.
fn composite_nodes(lo: f64, hi: f64, width: f64, breaks: &[f64]) -> (Vec<f64>, Vec<f64>) {
    let (gx, gw) = gauss_legendre(GL_ORDER);
    let mut edges = vec![lo];
    edges.extend(breaks.iter().copied().filter(|b| *b > lo && *b < hi));
    edges.push(hi);
    let (mut xs, mut ws) = (Vec::new(), Vec::new());
    for seg in edges.windows(2) {
        let panels = ((seg[1] - seg[0]) / width).ceil().max(1.0) as usize;
        let h = (seg[1] - seg[0]) / panels as f64;
        for p in 0..panels {
            let mid = seg[0] + (p as f64 + 0.5) * h;
            for (x, w) in gx.iter().zip(&gw) {
                xs.push(mid + 0.5 * h * x);
                ws.push(0.5 * h * w);
            }
        }
    }
    (xs, ws)
}

fn quadrature_once(spec: &OptionSpec, term: &MarketTermStructure, monitoring: Monitoring, resolution: f64) -> Result<f64> {
    let intervals = term.intervals();
    let y0 = spec.spot.ln();
    if !intervals[0].contains(spec.spot) {
        return Ok(0.0);
    }
    // Log-price nodes of each grid date 1..=N, restricted to the window (or
    // to +-12 standard deviations around the mean where a side is open).
    let mut levels: Vec<(Vec<f64>, Vec<f64>)> = Vec::with_capacity(intervals.len());
    let (mut mean, mut var) = (y0, 0.0);
    for (n, iv) in intervals.iter().enumerate() {
        mean += iv.log_mean();
        var += iv.variance();
        let band = 12.0 * var.sqrt();
        let lo = if iv.has_lower() { iv.lower.ln().max(mean - band) } else { mean - band };
        let hi = if iv.has_upper() { iv.upper.ln().min(mean + band) } else { mean + band };
        if !(lo < hi) {
            return Ok(0.0);
        }
        let breaks = if n + 1 == intervals.len() { vec![spec.strike.ln()] } else { Vec::new() };
        levels.push(composite_nodes(lo, hi, iv.log_std() / resolution, &breaks));
    }

    let continuous = monitoring == Monitoring::Continuous;
    let kernel = |iv: &Interval, yi: f64, yj: f64| -> Result<f64> {
        let z = (yj - yi - iv.log_mean()) / iv.log_std();
        let mut k = normal::pdf(z) / iv.log_std();
        if continuous && k > 0.0 {
            k *= bridge::no_hit_prob(&BridgeQuery::new(yi.exp(), yj.exp(), iv))?;
        }
        Ok(k)
    };

    let last = levels.len() - 1;
    let mut value: Vec<f64> = levels[last].0.iter().map(|y| spec.payoff_at(y.exp())).collect();
    for n in (1..=last).rev() {
        let iv = &intervals[n];
        let (ys, _) = &levels[n - 1];
        let (yn, wn) = &levels[n];
        let reach = 12.0 * iv.log_std();
        let mut prev = Vec::with_capacity(ys.len());
        for &yi in ys {
            let c = yi + iv.log_mean();
            let from = yn.partition_point(|y| *y < c - reach);
            let to = yn.partition_point(|y| *y <= c + reach);
            let mut acc = 0.0;
            for j in from..to {
                acc += wn[j] * kernel(iv, yi, yn[j])? * value[j];
            }
            prev.push(acc);
        }
        value = prev;
    }
    let (y1, w1) = &levels[0];
    let mut price = 0.0;
    for j in 0..y1.len() {
        price += w1[j] * kernel(&intervals[0], y0, y1[j])? * value[j];
    }
    Ok(term.discount_factor() * price)
}

/// Knock-out price from deterministic quadrature of the nested integral over
/// grid-date log-prices (backward induction with composite Gauss-Legendre
/// panels split at the strike). The continuous case weights each transition
/// with the bridge no-hit probability. `resolution` is the number of panels
/// per one-step standard deviation; the stated accuracy is the change when
/// it is doubled.
pub fn quadrature(spec: &OptionSpec, term: &MarketTermStructure, resolution: f64) -> Result<OraclePrice> {
    if !(resolution > 0.0) {
        return Err(Error::InvalidInput("quadrature resolution must be > 0".into()));
    }
    let coarse = quadrature_once(spec, term, spec.monitoring, resolution)?;
    let fine = quadrature_once(spec, term, spec.monitoring, 2.0 * resolution)?;
    Ok(OraclePrice {
        value: fine,
        method: "quadrature",
        accuracy: (fine - coarse).abs(),
    })
}

/// [`quadrature`] restricted to at most three grid intervals.
pub fn quadrature_small_n(spec: &OptionSpec, term: &MarketTermStructure, resolution: f64) -> Result<OraclePrice> {
    if term.steps() > 3 {
        return Err(Error::InvalidInput(format!(
            "small-N quadrature supports N <= 3, got {}",
            term.steps()
        )));
    }
    quadrature(spec, term, resolution)
}
