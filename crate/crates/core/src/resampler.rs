//! Sampling from a weighted discrete distribution with a single sorted sweep.
//!
//! `R` sorted uniforms are produced in O(R) from normalised partial sums of
//! `R + 1` unit exponentials (the arrival times of a Poisson process,
//! conditioned on the `(R+1)`-th arrival, are distributed as uniform order
//! statistics). The inverse CDF is then evaluated for all of them in one pass
//! over the cumulative weights, so a draw of `R` values costs O(R + M).

use rand::Rng;
use rand_distr::Exp1;

use crate::error::{Error, Result};

/// Atoms `x_1..x_M` with probabilities proportional to the given weights.
#[derive(Debug, Clone)]
pub struct WeightedSupport<'a> {
    values: &'a [f64],
    cumulative: Vec<f64>,
}

impl<'a> WeightedSupport<'a> {
    /// Normalises non-negative `weights`. Fails with [`Error::DegenerateSupport`]
    /// if they are all zero.
    pub fn new(values: &'a [f64], weights: &[f64]) -> Result<Self> {
        if values.len() != weights.len() {
            return Err(Error::InvalidInput(format!(
                "{} values but {} weights",
                values.len(),
                weights.len()
            )));
        }
        if let Some(w) = weights.iter().find(|w| !(w.is_finite() && **w >= 0.0)) {
            return Err(Error::InvalidInput(format!("weight {w} is not a finite non-negative number")));
        }
        let total: f64 = weights.iter().sum();
        if !(total > 0.0) {
            return Err(Error::DegenerateSupport);
        }
        let mut acc = 0.0;
        let mut cumulative: Vec<f64> = weights
            .iter()
            .map(|w| {
                acc += w;
                acc / total
            })
            .collect();
        // Pin the last positive-weight atom's cumulative sum to exactly 1 so it
        // stays reachable despite rounding; trailing zero-weight atoms follow it.
        let last_positive = weights.iter().rposition(|w| *w > 0.0).expect("total > 0");
        for c in &mut cumulative[last_positive..] {
            *c = 1.0;
        }
        Ok(WeightedSupport { values, cumulative })
    }

    /// Like [`WeightedSupport::new`] but requires the probabilities to sum to 1
    /// within 1e-12.
    pub fn from_probabilities(values: &'a [f64], probabilities: &[f64]) -> Result<Self> {
        let total: f64 = probabilities.iter().sum();
        if (total - 1.0).abs() > 1e-12 {
            return Err(Error::InvalidInput(format!("probabilities sum to {total}, not 1")));
        }
        WeightedSupport::new(values, probabilities)
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn values(&self) -> &[f64] {
        self.values
    }

    /// Normalised cumulative weights `p_1 + ... + p_k`.
    pub fn cumulative(&self) -> &[f64] {
        &self.cumulative
    }
}

/// `count` sorted uniforms on (0, 1), as `T_r / T_{count+1}` for partial sums
/// `T_r` of unit exponentials.
pub fn ordered_uniforms<R: Rng + ?Sized>(count: usize, rng: &mut R) -> Vec<f64> {
    let mut out = Vec::with_capacity(count);
    fill_ordered_uniforms(count, rng, &mut out);
    out
}

fn fill_ordered_uniforms<R: Rng + ?Sized>(count: usize, rng: &mut R, out: &mut Vec<f64>) {
    out.clear();
    let mut t = 0.0;
    for _ in 0..count {
        let e: f64 = rng.sample(Exp1);
        t += e;
        out.push(t);
    }
    let e: f64 = rng.sample(Exp1);
    let total = t + e;
    for v in out.iter_mut() {
        *v /= total;
    }
}

/// Draws `count` values from `support`. Output order follows the sorted
/// uniform stream, so it is non-decreasing in atom index.
pub fn resample_rejected<R: Rng + ?Sized>(support: &WeightedSupport<'_>, count: usize, rng: &mut R) -> Vec<f64> {
    let mut out = Vec::with_capacity(count);
    resample_into(support, count, rng, &mut out);
    out
}

/// [`resample_rejected`] writing into `out` (cleared first). Returns the number
/// of loop iterations of the sweep, which is at most `count + M`.
pub fn resample_into<R: Rng + ?Sized>(
    support: &WeightedSupport<'_>,
    count: usize,
    rng: &mut R,
    out: &mut Vec<f64>,
) -> usize {
    fill_ordered_uniforms(count, rng, out);
    if count == 0 {
        return 0;
    }
    let cumulative = &support.cumulative;
    let mut ops = 0;
    let mut k = 0;
    let mut r = 0;
    while r < count {
        // V_r < p_1 + ... + p_k picks atom k; ties move on to the next atom.
        while r < count && out[r] < cumulative[k] {
            out[r] = support.values[k];
            r += 1;
            ops += 1;
        }
        k += 1;
        ops += 1;
        if k == cumulative.len() {
            // Unreachable while V_r < 1 = last cumulative; guard against NaN input.
            debug_assert!(r == count);
            break;
        }
    }
    ops
}

/// Atom indices drawn for each sorted uniform, used by the engine to copy
/// whole particles rather than single values.
pub(crate) fn resample_indices_into<R: Rng + ?Sized>(
    cumulative: &[f64],
    count: usize,
    rng: &mut R,
    uniforms: &mut Vec<f64>,
    out: &mut Vec<usize>,
) {
    fill_ordered_uniforms(count, rng, uniforms);
    out.clear();
    let mut k = 0;
    for &v in uniforms.iter() {
        while !(v < cumulative[k]) && k + 1 < cumulative.len() {
            k += 1;
        }
        out.push(k);
    }
}

/// Cumulative normalised weights with the last positive atom pinned to 1.
/// Returns `None` if all weights are zero.
pub(crate) fn cumulative_weights_into(weights: &[f64], total: f64, out: &mut Vec<f64>) -> Option<()> {
    if !(total > 0.0) {
        return None;
    }
    out.clear();
    let mut acc = 0.0;
    out.extend(weights.iter().map(|w| {
        acc += w;
        acc / total
    }));
    let last_positive = weights.iter().rposition(|w| *w > 0.0)?;
    for c in &mut out[last_positive..] {
        *c = 1.0;
    }
    Some(())
}
