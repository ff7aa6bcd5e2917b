//! Probability that the price path stays inside the window between two
//! monitoring dates, as a function of where the second endpoint lands.

use barrier_smc::bridge::{no_hit_prob, no_hit_prob_double_with, BridgeQuery, DEFAULT_TOL};
use barrier_smc::model::Interval;

fn main() -> barrier_smc::Result<()> {
    let windows = [("lower only", 90.0, f64::INFINITY), ("upper only", 0.0, 110.0), ("double", 90.0, 110.0)];
    for dt in [0.5, 0.5 / 16.0] {
        println!("dt = {dt}");
        println!("{:>8} {:>12} {:>12} {:>12}", "s_next", windows[0].0, windows[1].0, windows[2].0);
        for s_next in [91.0, 95.0, 100.0, 105.0, 109.0] {
            let row = windows
                .iter()
                .map(|&(_, l, u)| {
                    let iv = Interval::new(dt, 0.1, 0.3, 0.1, l, u)?;
                    no_hit_prob(&BridgeQuery::new(100.0, s_next, &iv))
                })
                .collect::<barrier_smc::Result<Vec<_>>>()?;
            println!("{s_next:>8} {:>12.6} {:>12.6} {:>12.6}", row[0], row[1], row[2]);
        }
    }

    println!("image groups needed at tol {DEFAULT_TOL:e}:");
    for dt in [2.0, 0.5, 0.125, 0.5 / 128.0] {
        let iv = Interval::new(dt, 0.1, 0.3, 0.1, 90.0, 110.0)?;
        let (g, terms) = no_hit_prob_double_with(&BridgeQuery::new(100.0, 100.0, &iv), DEFAULT_TOL, 64)?;
        println!("  dt = {dt:<10} g = {g:.10}  groups = {terms}");
    }
    Ok(())
}
