//! Resampling with sorted uniforms: frequencies against the weights, and
//! the cost of one sweep.

use barrier_smc::resampler::{ordered_uniforms, resample_into, WeightedSupport};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn main() -> barrier_smc::Result<()> {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let values = [10.0, 20.0, 30.0, 40.0];
    let weights = [0.1, 0.0, 2.5, 1.4];
    let support = WeightedSupport::new(&values, &weights)?;
    let draws = 200_000;
    let mut out = Vec::new();
    let ops = resample_into(&support, draws, &mut rng, &mut out);
    let total: f64 = weights.iter().sum();
    for (v, w) in values.iter().zip(&weights) {
        let hits = out.iter().filter(|x| *x == v).count();
        println!("value {v:>4}  weight {:.4}  frequency {:.4}", w / total, hits as f64 / draws as f64);
    }
    println!("{draws} draws over {} atoms in {ops} sweep steps", values.len());
    println!("five ordered uniforms: {:.3?}", ordered_uniforms(5, &mut rng));
    Ok(())
}
