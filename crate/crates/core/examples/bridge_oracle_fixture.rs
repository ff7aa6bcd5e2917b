//! Simulates Brownian bridges on a fine grid and records how often they stay
//! inside a barrier window, for comparison with the closed-form no-hit
//! probabilities. Writes `tests/fixtures/bridge_oracle.json`.
//!
//! Each bridge is built step by step from its conditional law and monitored
//! at `substeps` points and at every fourth of them. Discrete monitoring
//! overstates survival by a term proportional to the square root of the
//! monitoring interval, so `2 * fine - coarse` removes it to leading order.
//!
//! cargo run --release --example bridge_oracle_fixture -- [bridges] [substeps] [out]

use std::path::PathBuf;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use serde::Serialize;

#[derive(Debug, Clone, Copy)]
struct EndpointSet {
    s_prev: f64,
    s_next: f64,
    sigma: f64,
    dt: f64,
    windows: &'static [(f64, f64)],
}

#[derive(Debug, Serialize)]
struct OraclePoint {
    s_prev: f64,
    s_next: f64,
    sigma: f64,
    dt: f64,
    lower: f64,
    /// `None` for no upper barrier.
    upper: Option<f64>,
    bridges: usize,
    substeps: usize,
    survival_fine: f64,
    survival_coarse: f64,
    survival: f64,
    stderr: f64,
}

const SETS: [EndpointSet; 3] = [
    EndpointSet { s_prev: 100.0, s_next: 100.0, sigma: 0.3, dt: 0.5, windows: &[(90.0, f64::INFINITY), (90.0, 110.0)] },
    EndpointSet { s_prev: 95.0, s_next: 105.0, sigma: 0.3, dt: 0.5, windows: &[(0.0, 110.0), (90.0, 110.0)] },
    EndpointSet { s_prev: 92.0, s_next: 97.0, sigma: 0.3, dt: 0.25, windows: &[(90.0, 110.0)] },
];

fn simulate(set: &EndpointSet, bridges: usize, substeps: usize, seed: u64) -> Vec<OraclePoint> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let x = (set.s_next / set.s_prev).ln();
    let total_var = set.sigma * set.sigma * set.dt;
    let h = total_var / substeps as f64;
    // Conditional step of a bridge pinned at x after the remaining variance.
    let pull: Vec<f64> = (0..substeps).map(|i| h / (total_var - i as f64 * h)).collect();
    let sd: Vec<f64> = (0..substeps)
        .map(|i| {
            let rest = total_var - i as f64 * h;
            (h * (rest - h) / rest).max(0.0).sqrt()
        })
        .collect();
    let logs: Vec<(f64, f64)> = set
        .windows
        .iter()
        .map(|&(l, u)| {
            let lo = if l > 0.0 { (l / set.s_prev).ln() } else { f64::NEG_INFINITY };
            let hi = if u.is_finite() { (u / set.s_prev).ln() } else { f64::INFINITY };
            (lo, hi)
        })
        .collect();
    let k = logs.len();
    let mut fine = vec![0usize; k];
    let mut coarse = vec![0usize; k];
    // Survival indicators combine as 2 * fine - coarse in {-1, 0, 1}.
    let mut combo_sq = vec![0usize; k];
    let mut combo = vec![0i64; k];
    for _ in 0..bridges {
        let (mut b, mut fmin, mut fmax, mut cmin, mut cmax) = (0.0f64, 0.0f64, 0.0f64, 0.0f64, 0.0f64);
        for i in 0..substeps {
            let z: f64 = rng.sample(StandardNormal);
            b += (x - b) * pull[i] + sd[i] * z;
            fmin = fmin.min(b);
            fmax = fmax.max(b);
            if (i + 1) % 4 == 0 {
                cmin = cmin.min(b);
                cmax = cmax.max(b);
            }
        }
        for (j, &(lo, hi)) in logs.iter().enumerate() {
            let f = (fmin > lo && fmax < hi) as i64;
            let c = (cmin > lo && cmax < hi) as i64;
            fine[j] += f as usize;
            coarse[j] += c as usize;
            let v = 2 * f - c;
            combo[j] += v;
            combo_sq[j] += (v * v) as usize;
        }
    }
    let n = bridges as f64;
    set.windows
        .iter()
        .enumerate()
        .map(|(j, &(lower, upper))| {
            let mean = combo[j] as f64 / n;
            let var = (combo_sq[j] as f64 / n - mean * mean) * n / (n - 1.0);
            OraclePoint {
                s_prev: set.s_prev,
                s_next: set.s_next,
                sigma: set.sigma,
                dt: set.dt,
                lower,
                upper: upper.is_finite().then_some(upper),
                bridges,
                substeps,
                survival_fine: fine[j] as f64 / n,
                survival_coarse: coarse[j] as f64 / n,
                survival: mean,
                stderr: (var / n).sqrt(),
            }
        })
        .collect()
}

fn main() {
    let args: Vec<String> = std::env::args().skip(1).collect();
    let bridges: usize = args.first().and_then(|s| s.parse().ok()).unwrap_or(1_000_000);
    let substeps: usize = args.get(1).and_then(|s| s.parse().ok()).unwrap_or(10_000);
    let out = args
        .get(2)
        .map(PathBuf::from)
        .unwrap_or_else(|| PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("tests/fixtures/bridge_oracle.json"));

    let mut points = Vec::new();
    for (i, set) in SETS.iter().enumerate() {
        let start = std::time::Instant::now();
        let pts = simulate(set, bridges, substeps, 1000 + i as u64);
        for p in &pts {
            println!(
                "{:>6} -> {:>6}  window ({}, {:?})  fine {:.5}  coarse {:.5}  extrapolated {:.5} +- {:.5}",
                p.s_prev, p.s_next, p.lower, p.upper, p.survival_fine, p.survival_coarse, p.survival, p.stderr
            );
        }
        eprintln!("set {i}: {:.1}s", start.elapsed().as_secs_f64());
        points.extend(pts);
    }
    let json = serde_json::to_string_pretty(&points).expect("serialise");
    std::fs::write(&out, json).expect("write fixture");
    println!("wrote {}", out.display());
}
