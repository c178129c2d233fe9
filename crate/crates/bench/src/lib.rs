//! Shared fixtures for the criterion benchmarks in `benches/`.

use fedcoalitions_cli::instance::{Instance, InstanceSpec, WeightDist};

/// A seeded random instance at the standard sweep settings.
pub fn instance(n: usize, alpha: f64, seed: u64) -> Instance {
    InstanceSpec {
        n,
        alpha,
        benefit_density: 0.5,
        weight_dist: WeightDist::default(),
        seed,
    }
    .generate()
    .expect("valid benchmark spec")
}
