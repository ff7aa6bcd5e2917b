//! Probability that a geometric Brownian bridge stays inside the barrier
//! window between two monitoring dates, given both endpoints.
//!
//! The single-barrier case is the reflection formula. The double-barrier case
//! is the method-of-images series, truncated adaptively: it stops at the first
//! group of four image terms whose total magnitude is below `tol`, or earlier
//! once a bound on the remaining tail is below `tol`.

use crate::error::{Error, Result};
use crate::model::Interval;

pub const DEFAULT_TOL: f64 = 1e-12;
pub const DEFAULT_MAX_TERMS: usize = 64;
/// Image terms with a smaller exponent are dropped; `ln(DEFAULT_TOL) - 5`.
const DEFAULT_CUTOFF: f64 = -32.63;

/// Endpoints of one interval plus the bridge variance and barrier window.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BridgeQuery {
    pub s_prev: f64,
    pub s_next: f64,
    /// `sigma^2 * dt`
    pub variance: f64,
    pub lower: f64,
    pub upper: f64,
}

impl BridgeQuery {
    #[inline]
    pub fn new(s_prev: f64, s_next: f64, interval: &Interval) -> Self {
        BridgeQuery {
            s_prev,
            s_next,
            variance: interval.variance(),
            lower: interval.lower,
            upper: interval.upper,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Side {
    Lower,
    Upper,
}

/// No-hit probability for the single barrier `barrier` on `side`.
///
/// Returns exactly 0 when either endpoint touches or crosses the barrier.
#[inline]
pub fn no_hit_prob_single(q: &BridgeQuery, barrier: f64, side: Side) -> f64 {
    let inside = match side {
        Side::Lower => q.s_prev > barrier && q.s_next > barrier,
        Side::Upper => q.s_prev < barrier && q.s_next < barrier,
    };
    if !inside {
        return 0.0;
    }
    let expo = 2.0 * (q.s_next / barrier).ln() * (q.s_prev / barrier).ln() / q.variance;
    (-(-expo).exp_m1()).clamp(0.0, 1.0)
}

/// Double-barrier no-hit probability with the default tolerance and term cap.
#[inline]
pub fn no_hit_prob_double(q: &BridgeQuery) -> Result<f64> {
    no_hit_prob_double_with(q, DEFAULT_TOL, DEFAULT_MAX_TERMS).map(|(p, _)| p)
}

/// Double-barrier no-hit probability. Also returns the number of image-term
/// groups summed. Endpoints on or outside the window give `(0, 0)`.
pub fn no_hit_prob_double_with(q: &BridgeQuery, tol: f64, max_terms: usize) -> Result<(f64, usize)> {
    let (lower, upper) = (q.lower, q.upper);
    if !(q.s_prev > lower && q.s_prev < upper && q.s_next > lower && q.s_next < upper) {
        return Ok((0.0, 0));
    }
    image_series(
        (q.s_next / q.s_prev).ln(),
        2.0 * (upper / lower).ln(),
        2.0 * (upper / q.s_prev).ln(),
        2.0 * (q.s_prev / lower).ln(),
        q.variance,
        tol,
        tol.ln() - 5.0,
        max_terms,
    )
}

/// `1 - sum_m [R(m alpha - gamma) + R(beta - m alpha)] + sum_m [R(m alpha) + R(-m alpha)]`
/// with `R(z) = exp(-z (z - 2x) / (2 var))`.
#[inline]
#[allow(clippy::too_many_arguments)]
fn image_series(
    x: f64,
    alpha: f64,
    beta: f64,
    gamma: f64,
    var: f64,
    tol: f64,
    cutoff: f64,
    max_terms: usize,
) -> Result<(f64, usize)> {
    let scale = -0.5 / var;
    // Exponents are non-positive for interior endpoints; terms under
    // exp(cutoff), far below tol, are dropped without calling exp.
    let image = |z: f64| {
        let e = z * (z - 2.0 * x) * scale;
        if e < cutoff {
            0.0
        } else {
            e.exp()
        }
    };
    // Every term of group m + 1 is below exp(-m^2 c), so for c >= 1 the tail
    // after group m is below 4 exp(-m^2 c) / (1 - exp(-1)) < tol once
    // m^2 c > 1.85 - ln(tol).
    let c = alpha * alpha * -scale;
    let tail_exponent = 6.85 - cutoff;
    let mut sum = 1.0;
    let mut last = f64::INFINITY;
    for m in 1..=max_terms {
        let am = alpha * m as f64;
        let reflected = image(am - gamma) + image(beta - am);
        let shifted = image(am) + image(-am);
        sum += shifted - reflected;
        last = reflected + shifted;
        let mf = m as f64;
        if last < tol || (c >= 1.0 && mf * mf * c > tail_exponent) {
            return Ok((sum.clamp(0.0, 1.0), m));
        }
    }
    Err(Error::SeriesNotConverged { tol, max_terms, last })
}

/// `g(s_prev, s_next)` for whatever barriers the window carries.
#[inline]
pub fn no_hit_prob(q: &BridgeQuery) -> Result<f64> {
    let has_lower = q.lower > 0.0;
    let has_upper = q.upper.is_finite();
    Ok(match (has_lower, has_upper) {
        (false, false) => 1.0,
        (true, false) => no_hit_prob_single(q, q.lower, Side::Lower),
        (false, true) => no_hit_prob_single(q, q.upper, Side::Upper),
        (true, true) => no_hit_prob_double(q)?,
    })
}

/// [`no_hit_prob`] from log prices `y = ln s`, using the interval's cached
/// log barriers. Saves the logarithms when the caller already has them.
#[inline]
pub fn no_hit_prob_log(y_prev: f64, y_next: f64, interval: &Interval) -> Result<f64> {
    let (ll, lu) = (interval.ln_lower(), interval.ln_upper());
    let var = interval.variance();
    let single = |d0: f64, d1: f64| {
        if d0 > 0.0 && d1 > 0.0 {
            (-(-2.0 * d0 * d1 / var).exp_m1()).clamp(0.0, 1.0)
        } else {
            0.0
        }
    };
    Ok(match (interval.has_lower(), interval.has_upper()) {
        (false, false) => 1.0,
        (true, false) => single(y_prev - ll, y_next - ll),
        (false, true) => single(lu - y_prev, lu - y_next),
        (true, true) => {
            if !(y_prev > ll && y_prev < lu && y_next > ll && y_next < lu) {
                return Ok(0.0);
            }
            image_series(
                y_next - y_prev,
                2.0 * (lu - ll),
                2.0 * (lu - y_prev),
                2.0 * (y_prev - ll),
                var,
                DEFAULT_TOL,
                DEFAULT_CUTOFF,
                DEFAULT_MAX_TERMS,
            )?
            .0
        }
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn query(s_prev: f64, s_next: f64, lower: f64, upper: f64) -> BridgeQuery {
        BridgeQuery {
            s_prev,
            s_next,
            variance: 0.09 * 0.5,
            lower,
            upper,
        }
    }

    #[test]
    fn default_cutoff_matches_tolerance() {
        assert!((DEFAULT_CUTOFF - (DEFAULT_TOL.ln() - 5.0)).abs() < 0.01);
    }

    #[test]
    fn single_touching_barrier_is_certain_hit() {
        let q = query(90.0, 100.0, 90.0, f64::INFINITY);
        assert_eq!(no_hit_prob_single(&q, 90.0, Side::Lower), 0.0);
        let q = query(105.0, 110.0, 0.0, 110.0);
        assert_eq!(no_hit_prob_single(&q, 110.0, Side::Upper), 0.0);
        let q = query(100.0, 85.0, 90.0, f64::INFINITY);
        assert_eq!(no_hit_prob_single(&q, 90.0, Side::Lower), 0.0);
    }

    #[test]
    fn single_vanishing_variance_is_certain_survival() {
        let mut q = query(100.0, 101.0, 90.0, f64::INFINITY);
        q.variance = 1e-9;
        assert_eq!(no_hit_prob_single(&q, 90.0, Side::Lower), 1.0);
    }

    #[test]
    fn single_reference_value() {
        // 1 - exp(-2 ln(100/90)^2 / 0.045), 40-digit reference.
        let q = query(100.0, 100.0, 90.0, f64::INFINITY);
        let g = no_hit_prob_single(&q, 90.0, Side::Lower);
        assert!((g - 0.389_435_041_717_951).abs() < 1e-13);
    }

    #[test]
    fn single_is_symmetric_in_endpoints() {
        let a = query(97.0, 104.0, 0.0, 110.0);
        let b = query(104.0, 97.0, 0.0, 110.0);
        assert_eq!(
            no_hit_prob_single(&a, 110.0, Side::Upper),
            no_hit_prob_single(&b, 110.0, Side::Upper)
        );
    }

    #[test]
    fn double_endpoint_on_barrier_is_zero() {
        assert_eq!(no_hit_prob_double(&query(90.0, 100.0, 90.0, 110.0)).unwrap(), 0.0);
        assert_eq!(no_hit_prob_double(&query(100.0, 110.0, 90.0, 110.0)).unwrap(), 0.0);
        assert_eq!(no_hit_prob_double(&query(100.0, 120.0, 90.0, 110.0)).unwrap(), 0.0);
    }

    #[test]
    fn double_tends_to_single_as_lower_vanishes() {
        for (s0, s1) in [(100.0, 100.0), (95.0, 108.0), (109.0, 104.0)] {
            let single = no_hit_prob_single(&query(s0, s1, 0.0, 110.0), 110.0, Side::Upper);
            let double = no_hit_prob_double(&query(s0, s1, 1e-6, 110.0)).unwrap();
            assert!((single - double).abs() < 1e-6, "{single} vs {double}");
        }
    }

    #[test]
    fn double_never_exceeds_either_single() {
        for (s0, s1) in [(100.0, 100.0), (91.0, 92.0), (109.0, 101.0)] {
            let q = query(s0, s1, 90.0, 110.0);
            let d = no_hit_prob_double(&q).unwrap();
            assert!(d <= no_hit_prob_single(&q, 90.0, Side::Lower) + 1e-15);
            assert!(d <= no_hit_prob_single(&q, 110.0, Side::Upper) + 1e-15);
            assert!(d > 0.0);
        }
    }

    #[test]
    fn halving_tolerance_is_consistent() {
        let q = BridgeQuery {
            variance: 0.09 * 4.0,
            ..query(100.0, 102.0, 90.0, 110.0)
        };
        let mut tol = 1e-4;
        let mut prev = no_hit_prob_double_with(&q, tol, 64).unwrap().0;
        for _ in 0..20 {
            let next = no_hit_prob_double_with(&q, tol / 2.0, 64).unwrap().0;
            assert!((next - prev).abs() < tol);
            prev = next;
            tol /= 2.0;
        }
    }

    #[test]
    fn fewer_terms_for_shorter_intervals() {
        for (s0, s1) in [(100.0, 100.0), (92.0, 108.0), (109.5, 90.5)] {
            let mut last = usize::MAX;
            for k in 0..10 {
                let q = BridgeQuery {
                    variance: 0.09 * 2.0 / 2f64.powi(k),
                    ..query(s0, s1, 90.0, 110.0)
                };
                let (_, terms) = no_hit_prob_double_with(&q, DEFAULT_TOL, DEFAULT_MAX_TERMS).unwrap();
                assert!(terms <= last, "dt/2^{k}: {terms} > {last}");
                last = terms;
            }
        }
    }

    #[test]
    fn truncation_matches_long_sum() {
        let brute = |q: &BridgeQuery| {
            let (x, a) = ((q.s_next / q.s_prev).ln(), 2.0 * (q.upper / q.lower).ln());
            let (b, g) = (2.0 * (q.upper / q.s_prev).ln(), 2.0 * (q.s_prev / q.lower).ln());
            let r = |z: f64| (-z * (z - 2.0 * x) / (2.0 * q.variance)).exp();
            1.0 + (1..400)
                .map(|m| {
                    let am = a * m as f64;
                    r(am) + r(-am) - r(am - g) - r(b - am)
                })
                .sum::<f64>()
        };
        for var in [0.0004, 0.005, 0.02, 0.0402, 0.045, 0.1, 0.4, 2.0] {
            for (s0, s1) in [(100.0, 100.0), (90.5, 109.5), (109.9, 109.9), (95.0, 104.0)] {
                let q = BridgeQuery {
                    variance: var,
                    ..query(s0, s1, 90.0, 110.0)
                };
                let d = no_hit_prob_double(&q).unwrap();
                assert!((d - brute(&q).clamp(0.0, 1.0)).abs() < 1e-12, "var {var} {s0}->{s1}");
            }
        }
    }

    #[test]
    fn term_cap_is_reported() {
        let q = BridgeQuery {
            variance: 100.0,
            ..query(100.0, 100.0, 99.0, 101.0)
        };
        assert!(matches!(
            no_hit_prob_double_with(&q, 1e-12, 3),
            Err(Error::SeriesNotConverged { max_terms: 3, .. })
        ));
    }

    #[test]
    fn log_form_agrees_with_price_form() {
        let windows = [(90.0, 110.0), (90.0, f64::INFINITY), (0.0, 110.0), (0.0, f64::INFINITY)];
        for (l, u) in windows {
            let iv = Interval::new(0.5, 0.1, 0.3, 0.1, l, u).unwrap();
            for (s0, s1) in [(100.0, 100.0), (91.0, 109.0), (105.0, 95.5), (100.0, 120.0)] {
                let q = BridgeQuery::new(s0, s1, &iv);
                let a = no_hit_prob(&q).unwrap();
                let b = no_hit_prob_log(f64::ln(s0), f64::ln(s1), &iv).unwrap();
                assert!((a - b).abs() < 1e-13, "({l},{u}) {s0}->{s1}: {a} vs {b}");
            }
        }
    }

    #[test]
    fn dispatch() {
        let q = query(100.0, 104.0, 0.0, f64::INFINITY);
        assert_eq!(no_hit_prob(&q).unwrap(), 1.0);
        let q = query(100.0, 104.0, 90.0, f64::INFINITY);
        assert_eq!(no_hit_prob(&q).unwrap(), no_hit_prob_single(&q, 90.0, Side::Lower));
        let q = query(100.0, 104.0, 0.0, 110.0);
        assert_eq!(no_hit_prob(&q).unwrap(), no_hit_prob_single(&q, 110.0, Side::Upper));
        let q = query(100.0, 104.0, 90.0, 110.0);
        assert_eq!(no_hit_prob(&q).unwrap(), no_hit_prob_double(&q).unwrap());
    }
}
