//! Fixture builders shared by the criterion benchmarks.

use wefsub::generate::{generate_instance, trial_rng, ValuationDistribution, WeightRule};
use wefsub::model::{Allocation, Instance};

/// Additive instance with the experiments' default weights.
pub fn additive_instance(n: usize, m: usize, seed: u64) -> Instance {
    let dist = ValuationDistribution::DiscreteUniform { lo: 5, hi: 6 };
    generate_instance(n, m, &WeightRule::Ascending, &dist, &mut trial_rng(seed, 0))
        .expect("valid benchmark instance")
}

/// Binary instance with the experiments' default weights.
pub fn binary_instance(n: usize, m: usize, seed: u64) -> Instance {
    let dist = ValuationDistribution::Bernoulli { p: 0.5 };
    generate_instance(n, m, &WeightRule::Ascending, &dist, &mut trial_rng(seed, 0))
        .expect("valid benchmark instance")
}

/// A deterministic round-robin allocation.
pub fn round_robin(n: usize, m: usize) -> Allocation {
    Allocation::from_owners((0..m).map(|o| o % n).collect(), n).expect("valid allocation")
}
