//! Knock-out barrier options under piecewise-constant geometric Brownian
//! motion, priced by plain Monte Carlo and by a sequential Monte Carlo
//! (interacting particle) estimator.
//!
//! The particle estimator moves `M` particles one grid interval at a time,
//! weights each transition by its chance of surviving the barrier window,
//! keeps it with that probability and recycles the rejected ones from the
//! survivors. Its price is the discounted product of the mean weights times the
//! mean terminal payoff. Because particles are recycled instead of lost, its
//! relative error stays flat as the number of monitoring dates grows, where the
//! plain estimator degrades with the survival probability.
//!
//! ```
//! use barrier_smc::engine::{price_mc, price_smc};
//! use barrier_smc::model::{MarketTermStructure, Monitoring, OptionSpec, PayoffKind};
//! use barrier_smc::potentials::PotentialKind;
//! use rand::SeedableRng;
//! use rand_chacha::ChaCha8Rng;
//!
//! let spec = OptionSpec::new(PayoffKind::Call, 100.0, 100.0, Monitoring::Continuous)?;
//! let term = MarketTermStructure::uniform(16, 0.5, 0.1, 0.0, 0.3, 90.0, 110.0)?;
//! let mut rng = ChaCha8Rng::seed_from_u64(1);
//! let smc = price_smc(&spec, &term, 20_000, &PotentialKind::Standard, &mut rng)?;
//! let mc = price_mc(&spec, &term, 20_000, &mut rng)?;
//! assert!((smc.price - 0.00806).abs() < 5e-4);
//! assert!((mc.price - 0.00806).abs() < 3e-3);
//! # Ok::<(), barrier_smc::Error>(())
//! ```
//!
//! Modules:
//! - [`model`]: term structure, option terms, exact and window-conditioned steps
//! - [`bridge`]: probability a bridge between two dates stays inside the window
//! - [`potentials`]: the weight families, including importance twists
//! - [`resampler`]: sampling from weighted particles with sorted uniforms
//! - [`engine`]: the estimators
//! - [`oracles`]: closed forms and quadrature used as references
//! - [`harness`]: repeated experiments, efficiency ratios, CSV/JSON output

pub mod bridge;
pub mod engine;
pub mod error;
pub mod harness;
pub mod model;
pub mod normal;
pub mod oracles;
pub mod potentials;
pub mod resampler;

pub use engine::{price_knock_in, price_mc, price_smc, Method, PriceEstimate};
pub use error::{Error, Result};
pub use model::{Direction, Interval, MarketTermStructure, Monitoring, OptionSpec, PayoffKind};
pub use potentials::PotentialKind;
