//! Seeded random instance generation for tests and benchmarks.
//!
//! All sampling is ChaCha-based and fully determined by `(seed, stream)`, so
//! parallel and serial runs produce identical instances. Values are sampled
//! as integers; downstream arithmetic stays exact.

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::model::{Instance, ValuationProfile, Weights};
use crate::rational::{rat_int, Rational};
use crate::Result;

/// How agent weights are chosen.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum WeightRule {
    /// `w = (1, 2, ..., n)`, the experiments' default.
    Ascending,
    /// All weights 1 (the unweighted setting).
    Uniform,
    /// An explicit weight vector.
    Explicit(Vec<Rational>),
}

impl WeightRule {
    pub fn weights(&self, n: usize) -> Result<Weights> {
        match self {
            WeightRule::Ascending => Ok(Weights::ascending(n)),
            WeightRule::Uniform => Ok(Weights::uniform(n)),
            WeightRule::Explicit(values) => Weights::new(values.clone()),
        }
    }
}

/// Distribution of the random valuations.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ValuationDistribution {
    /// Independent integer values in `lo..=hi` per agent-item pair (additive).
    DiscreteUniform { lo: i64, hi: i64 },
    /// Each agent likes each item independently with probability `p` (binary).
    Bernoulli { p: f64 },
    /// One shared integer value in `lo..=hi` per item (identical additive).
    IdenticalUniform { lo: i64, hi: i64 },
    /// Identical items; each agent's per-item value in `lo..=hi`.
    PerAgentUniform { lo: i64, hi: i64 },
}

impl ValuationDistribution {
    /// The largest value the distribution can produce (the `V` used in the
    /// distribution-level bound columns).
    pub fn max_value(&self) -> Rational {
        match self {
            Self::DiscreteUniform { hi, .. } => rat_int(*hi),
            Self::Bernoulli { .. } => rat_int(1),
            Self::IdenticalUniform { hi, .. } => rat_int(*hi),
            Self::PerAgentUniform { hi, .. } => rat_int(*hi),
        }
    }

    pub fn sample_profile(&self, n: usize, m: usize, rng: &mut impl Rng) -> Result<ValuationProfile> {
        match *self {
            Self::DiscreteUniform { lo, hi } => {
                let matrix = (0..n)
                    .map(|_| (0..m).map(|_| rat_int(rng.gen_range(lo..=hi))).collect())
                    .collect();
                ValuationProfile::additive(matrix)
            }
            Self::Bernoulli { p } => {
                let matrix = (0..n)
                    .map(|_| (0..m).map(|_| rng.gen_bool(p)).collect())
                    .collect();
                ValuationProfile::binary(matrix)
            }
            Self::IdenticalUniform { lo, hi } => {
                let items = (0..m).map(|_| rat_int(rng.gen_range(lo..=hi))).collect();
                ValuationProfile::identical_additive(items)
            }
            Self::PerAgentUniform { lo, hi } => {
                let per_agent = (0..n).map(|_| rat_int(rng.gen_range(lo..=hi))).collect();
                ValuationProfile::identical_items(per_agent, m)
            }
        }
    }
}

/// Independent generator for trial `stream` under a base seed
/// (counter-based splitting: the stream id selects a disjoint ChaCha stream).
pub fn trial_rng(seed: u64, stream: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

/// One random instance.
pub fn generate_instance(
    n: usize,
    m: usize,
    weights: &WeightRule,
    distribution: &ValuationDistribution,
    rng: &mut impl Rng,
) -> Result<Instance> {
    let weights = weights.weights(n)?;
    let profile = distribution.sample_profile(n, m, rng)?;
    Instance::new(weights, profile)
}
