//! Domain types: weights, valuation profiles, instances, allocations and
//! outcomes, plus the derived scalars used by the subsidy bounds.

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};

use crate::error::Error;
use crate::rational::{format_rational, gcd_all, lcm_all, rat_int, Rational};
use crate::Result;

/// Strictly positive entitlements, one per agent.
///
/// Agents are never reordered implicitly: algorithms that need a sorted view
/// work on an explicit permutation and report results in original indexing.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Weights {
    values: Vec<Rational>,
}

impl Weights {
    pub fn new(values: Vec<Rational>) -> Result<Self> {
        if values.is_empty() {
            return Err(Error::InvalidWeights("need at least one agent".into()));
        }
        if let Some(w) = values.iter().find(|w| !w.is_positive()) {
            return Err(Error::InvalidWeights(format!("weight {} is not positive", format_rational(w))));
        }
        Ok(Self { values })
    }

    pub fn uniform(n: usize) -> Self {
        Self::new(vec![Rational::one(); n]).expect("n >= 1")
    }

    /// The experiments' default `w = (1, 2, ..., n)`.
    pub fn ascending(n: usize) -> Self {
        Self::new((1..=n as i64).map(rat_int).collect()).expect("n >= 1")
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn get(&self, agent: usize) -> &Rational {
        &self.values[agent]
    }

    pub fn as_slice(&self) -> &[Rational] {
        &self.values
    }

    /// `W`, the sum of all entitlements.
    pub fn total(&self) -> Rational {
        self.values.iter().sum()
    }

    /// `w_min`, the smallest entitlement.
    pub fn min(&self) -> Rational {
        self.values.iter().min().expect("non-empty").clone()
    }

    /// The second-smallest entitlement (with multiplicity), used by the
    /// refined binary subsidy bound. `None` for a single agent.
    pub fn second_smallest(&self) -> Option<Rational> {
        let mut sorted = self.values.clone();
        sorted.sort();
        sorted.get(1).cloned()
    }

    /// Metadata only: whether the stored order is already ascending.
    pub fn is_sorted_ascending(&self) -> bool {
        self.values.windows(2).all(|w| w[0] <= w[1])
    }

    /// The unique positive-integer vector proportional to these weights with
    /// gcd 1. Clears denominators with an lcm, then divides by the gcd; all
    /// pairwise ratios `w_i / w_j` are preserved exactly.
    pub fn gcd_normalized(&self) -> Weights {
        let denoms: Vec<BigInt> = self.values.iter().map(|w| w.denom().clone()).collect();
        let l = lcm_all(&denoms);
        let ints: Vec<BigInt> = self
            .values
            .iter()
            .map(|w| w.numer() * (&l / w.denom()))
            .collect();
        let g = gcd_all(&ints);
        let values = ints
            .into_iter()
            .map(|i| Rational::from_integer(i / &g))
            .collect();
        Weights { values }
    }
}

/// One of the structured valuation classes.
///
/// All variants are normalized (`v(∅) = 0`) and monotone; the `Table` variant
/// is the only one where that must be validated explicitly at construction.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ValuationProfile {
    /// `n x m` matrix of non-negative item values; bundle value is the sum.
    Additive { matrix: Vec<Vec<Rational>> },
    /// `n x m` 0/1 matrix; bundle value is the number of liked items.
    Binary { matrix: Vec<Vec<bool>> },
    /// One shared value per item, identical across agents.
    IdenticalAdditive { items: Vec<Rational> },
    /// `m` identical items; agent `i` values any single item at `per_agent[i]`.
    IdenticalItems { per_agent: Vec<Rational>, m: usize },
    /// Capped count: `v_i(A) = min(cap_i, |A|)` (uniform-matroid rank).
    Capped { caps: Vec<Rational>, m: usize },
    /// Explicit table: `bundles[i][mask]` is agent `i`'s value for the subset
    /// encoded by `mask`. Restricted to `m <= 20` items.
    Table { bundles: Vec<Vec<Rational>>, m: usize },
}

/// Guard for table profiles: `2^m` entries per agent.
pub const MAX_TABLE_ITEMS: usize = 20;

impl ValuationProfile {
    pub fn additive(matrix: Vec<Vec<Rational>>) -> Result<Self> {
        check_matrix(&matrix, |v| !v.is_negative(), "additive values must be >= 0")?;
        Ok(Self::Additive { matrix })
    }

    pub fn binary(matrix: Vec<Vec<bool>>) -> Result<Self> {
        if matrix.is_empty() {
            return Err(Error::InvalidProfile("need at least one agent".into()));
        }
        let m = matrix[0].len();
        if matrix.iter().any(|row| row.len() != m) {
            return Err(Error::DimensionMismatch("ragged binary matrix".into()));
        }
        Ok(Self::Binary { matrix })
    }

    pub fn identical_additive(items: Vec<Rational>) -> Result<Self> {
        if items.iter().any(|v| v.is_negative()) {
            return Err(Error::InvalidProfile("item values must be >= 0".into()));
        }
        Ok(Self::IdenticalAdditive { items })
    }

    pub fn identical_items(per_agent: Vec<Rational>, m: usize) -> Result<Self> {
        if per_agent.is_empty() {
            return Err(Error::InvalidProfile("need at least one agent".into()));
        }
        if per_agent.iter().any(|v| v.is_negative()) {
            return Err(Error::InvalidProfile("per-item values must be >= 0".into()));
        }
        Ok(Self::IdenticalItems { per_agent, m })
    }

    pub fn capped(caps: Vec<Rational>, m: usize) -> Result<Self> {
        if caps.is_empty() {
            return Err(Error::InvalidProfile("need at least one agent".into()));
        }
        if caps.iter().any(|c| c.is_negative()) {
            return Err(Error::InvalidProfile("caps must be >= 0".into()));
        }
        Ok(Self::Capped { caps, m })
    }

    /// Builds a table profile and validates normalization and monotonicity by
    /// brute force over all `subset ∪ {item}` pairs.
    pub fn table(bundles: Vec<Vec<Rational>>) -> Result<Self> {
        if bundles.is_empty() {
            return Err(Error::InvalidProfile("need at least one agent".into()));
        }
        let size = bundles[0].len();
        if !size.is_power_of_two() {
            return Err(Error::InvalidProfile(format!("table size {size} is not a power of two")));
        }
        let m = size.trailing_zeros() as usize;
        if m > MAX_TABLE_ITEMS {
            return Err(Error::InvalidProfile(format!("table profiles support at most {MAX_TABLE_ITEMS} items")));
        }
        for (i, row) in bundles.iter().enumerate() {
            if row.len() != size {
                return Err(Error::DimensionMismatch(format!("agent {i} table has {} entries, expected {size}", row.len())));
            }
            if !row[0].is_zero() {
                return Err(Error::InvalidProfile(format!("agent {i} is not normalized: v(empty) != 0")));
            }
            for mask in 0..size {
                for o in 0..m {
                    if mask & (1 << o) == 0 && row[mask | (1 << o)] < row[mask] {
                        return Err(Error::InvalidProfile(format!(
                            "agent {i} is not monotone: v({:#b}) < v({:#b})",
                            mask | (1 << o),
                            mask
                        )));
                    }
                }
            }
        }
        Ok(Self::Table { bundles, m })
    }

    pub fn agents(&self) -> usize {
        match self {
            Self::Additive { matrix } => matrix.len(),
            Self::Binary { matrix } => matrix.len(),
            Self::IdenticalAdditive { .. } => 0, // any number of agents
            Self::IdenticalItems { per_agent, .. } => per_agent.len(),
            Self::Capped { caps, .. } => caps.len(),
            Self::Table { bundles, .. } => bundles.len(),
        }
    }

    pub fn items(&self) -> usize {
        match self {
            Self::Additive { matrix } => matrix.first().map_or(0, Vec::len),
            Self::Binary { matrix } => matrix.first().map_or(0, Vec::len),
            Self::IdenticalAdditive { items } => items.len(),
            Self::IdenticalItems { m, .. } => *m,
            Self::Capped { m, .. } => *m,
            Self::Table { m, .. } => *m,
        }
    }

    /// Name used in error messages and the JSON `type` tag.
    pub fn variant_name(&self) -> &'static str {
        match self {
            Self::Additive { .. } => "additive",
            Self::Binary { .. } => "binary",
            Self::IdenticalAdditive { .. } => "identical_additive",
            Self::IdenticalItems { .. } => "identical_items",
            Self::Capped { .. } => "capped",
            Self::Table { .. } => "table",
        }
    }

    /// Additive-class profiles are the ones whose bundle value is a sum of
    /// per-item values.
    pub fn is_additive_class(&self) -> bool {
        matches!(
            self,
            Self::Additive { .. } | Self::Binary { .. } | Self::IdenticalAdditive { .. } | Self::IdenticalItems { .. }
        )
    }

    /// Per-item value for additive-class profiles.
    ///
    /// Panics on `Capped`/`Table`; callers check [`Self::is_additive_class`].
    pub fn item_value(&self, agent: usize, item: usize) -> Rational {
        match self {
            Self::Additive { matrix } => matrix[agent][item].clone(),
            Self::Binary { matrix } => {
                if matrix[agent][item] {
                    Rational::one()
                } else {
                    Rational::zero()
                }
            }
            Self::IdenticalAdditive { items } => items[item].clone(),
            Self::IdenticalItems { per_agent, .. } => per_agent[agent].clone(),
            _ => panic!("item_value is only defined for additive-class profiles"),
        }
    }
}

fn check_matrix<T, F: Fn(&T) -> bool>(matrix: &[Vec<T>], ok: F, msg: &str) -> Result<()> {
    if matrix.is_empty() {
        return Err(Error::InvalidProfile("need at least one agent".into()));
    }
    let m = matrix[0].len();
    for row in matrix {
        if row.len() != m {
            return Err(Error::DimensionMismatch("ragged matrix".into()));
        }
        if !row.iter().all(&ok) {
            return Err(Error::InvalidProfile(msg.into()));
        }
    }
    Ok(())
}

/// A fair-division instance: agents with weights and a valuation profile over
/// `m` items. Immutable after construction.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Instance {
    weights: Weights,
    valuations: ValuationProfile,
}

impl Instance {
    pub fn new(weights: Weights, valuations: ValuationProfile) -> Result<Self> {
        let declared = valuations.agents();
        if declared != 0 && declared != weights.len() {
            return Err(Error::DimensionMismatch(format!(
                "{} weights but {} agents in the valuation profile",
                weights.len(),
                declared
            )));
        }
        Ok(Self { weights, valuations })
    }

    pub fn n(&self) -> usize {
        self.weights.len()
    }

    pub fn m(&self) -> usize {
        self.valuations.items()
    }

    pub fn weights(&self) -> &Weights {
        &self.weights
    }

    pub fn valuations(&self) -> &ValuationProfile {
        &self.valuations
    }

    /// Exact bundle value `v_agent(bundle)`.
    ///
    /// `bundle` must hold distinct item indices `< m`; indices out of range
    /// panic (user input is validated at the parsing boundary).
    pub fn value(&self, agent: usize, bundle: &[usize]) -> Rational {
        assert!(agent < self.n(), "agent index {agent} out of range");
        let m = self.m();
        for &o in bundle {
            assert!(o < m, "item index {o} out of range");
        }
        match &self.valuations {
            ValuationProfile::Additive { matrix } => bundle.iter().map(|&o| &matrix[agent][o]).sum(),
            ValuationProfile::Binary { matrix } => {
                rat_int(bundle.iter().filter(|&&o| matrix[agent][o]).count() as i64)
            }
            ValuationProfile::IdenticalAdditive { items } => bundle.iter().map(|&o| &items[o]).sum(),
            ValuationProfile::IdenticalItems { per_agent, .. } => {
                &per_agent[agent] * rat_int(bundle.len() as i64)
            }
            ValuationProfile::Capped { caps, .. } => {
                let size = rat_int(bundle.len() as i64);
                if caps[agent] < size {
                    caps[agent].clone()
                } else {
                    size
                }
            }
            ValuationProfile::Table { bundles, .. } => {
                let mut mask = 0usize;
                for &o in bundle {
                    mask |= 1 << o;
                }
                bundles[agent][mask].clone()
            }
        }
    }

    /// `V = max over agents i and non-empty bundles A of v_i(A) / |A|`.
    ///
    /// For additive-class profiles this reduces to the maximum single-item
    /// value; for capped profiles to `min(1, max cap)`; tables are brute
    /// forced over all non-empty subsets.
    pub fn max_value_density(&self) -> Result<Rational> {
        if self.m() == 0 {
            return Err(Error::NoItems);
        }
        let v = match &self.valuations {
            ValuationProfile::Additive { matrix } => {
                matrix.iter().flatten().max().expect("non-empty").clone()
            }
            ValuationProfile::Binary { matrix } => {
                if matrix.iter().flatten().any(|&b| b) {
                    Rational::one()
                } else {
                    Rational::zero()
                }
            }
            ValuationProfile::IdenticalAdditive { items } => {
                items.iter().max().expect("non-empty").clone()
            }
            ValuationProfile::IdenticalItems { per_agent, .. } => {
                per_agent.iter().max().expect("non-empty").clone()
            }
            ValuationProfile::Capped { caps, .. } => {
                let best = caps.iter().max().expect("non-empty").clone();
                if best > Rational::one() {
                    Rational::one()
                } else {
                    best
                }
            }
            ValuationProfile::Table { bundles, m } => {
                let mut best = Rational::zero();
                for row in bundles {
                    for mask in 1usize..(1 << m) {
                        let density = &row[mask] / rat_int(mask.count_ones() as i64);
                        if density > best {
                            best = density;
                        }
                    }
                }
                best
            }
        };
        Ok(v)
    }
}

/// A complete allocation: every item has exactly one owner.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Allocation {
    owner: Vec<usize>,
    n: usize,
}

impl Allocation {
    /// From an owner vector: `owner[o]` is the agent holding item `o`.
    pub fn from_owners(owner: Vec<usize>, n: usize) -> Result<Self> {
        if let Some(&a) = owner.iter().find(|&&a| a >= n) {
            return Err(Error::DimensionMismatch(format!("owner index {a} out of range for {n} agents")));
        }
        Ok(Self { owner, n })
    }

    /// From explicit bundles; they must partition `0..m`.
    pub fn from_bundles(bundles: &[Vec<usize>], m: usize) -> Result<Self> {
        let n = bundles.len();
        let mut owner = vec![usize::MAX; m];
        for (agent, bundle) in bundles.iter().enumerate() {
            for &o in bundle {
                if o >= m {
                    return Err(Error::DimensionMismatch(format!("item index {o} out of range")));
                }
                if owner[o] != usize::MAX {
                    return Err(Error::DimensionMismatch(format!("item {o} assigned twice")));
                }
                owner[o] = agent;
            }
        }
        if let Some(o) = owner.iter().position(|&a| a == usize::MAX) {
            return Err(Error::DimensionMismatch(format!("item {o} unassigned; allocations must be complete")));
        }
        Ok(Self { owner, n })
    }

    /// Count form for identical items: agent `i` receives `counts[i]` items,
    /// assigned in contiguous blocks (the lexicographically-first owner
    /// vector realizing the counts).
    pub fn from_counts(counts: &[usize]) -> Self {
        let mut owner = Vec::with_capacity(counts.iter().sum());
        for (agent, &c) in counts.iter().enumerate() {
            owner.extend(std::iter::repeat_n(agent, c));
        }
        Self { owner, n: counts.len() }
    }

    pub fn m(&self) -> usize {
        self.owner.len()
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn owner(&self, item: usize) -> usize {
        self.owner[item]
    }

    pub fn owners(&self) -> &[usize] {
        &self.owner
    }

    /// Items held by each agent, in ascending item order.
    pub fn bundles(&self) -> Vec<Vec<usize>> {
        let mut bundles = vec![Vec::new(); self.n];
        for (o, &a) in self.owner.iter().enumerate() {
            bundles[a].push(o);
        }
        bundles
    }

    /// `(m_1, ..., m_n)` view.
    pub fn counts(&self) -> Vec<usize> {
        let mut counts = vec![0usize; self.n];
        for &a in &self.owner {
            counts[a] += 1;
        }
        counts
    }
}

/// Non-negative payment per agent.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SubsidyVector {
    amounts: Vec<Rational>,
}

impl SubsidyVector {
    pub fn new(amounts: Vec<Rational>) -> Result<Self> {
        if let Some(p) = amounts.iter().find(|p| p.is_negative()) {
            return Err(Error::InvalidWeights(format!("subsidy {} is negative", format_rational(p))));
        }
        Ok(Self { amounts })
    }

    pub fn zeros(n: usize) -> Self {
        Self { amounts: vec![Rational::zero(); n] }
    }

    pub fn get(&self, agent: usize) -> &Rational {
        &self.amounts[agent]
    }

    pub fn as_slice(&self) -> &[Rational] {
        &self.amounts
    }

    pub fn len(&self) -> usize {
        self.amounts.len()
    }

    pub fn is_empty(&self) -> bool {
        self.amounts.is_empty()
    }

    pub fn total(&self) -> Rational {
        self.amounts.iter().sum()
    }
}

/// An allocation together with the subsidies paid to each agent.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Outcome {
    pub allocation: Allocation,
    pub subsidies: SubsidyVector,
}

impl Outcome {
    pub fn new(allocation: Allocation, subsidies: SubsidyVector) -> Result<Self> {
        if allocation.n() != subsidies.len() {
            return Err(Error::DimensionMismatch(format!(
                "{} bundles but {} subsidies",
                allocation.n(),
                subsidies.len()
            )));
        }
        Ok(Self { allocation, subsidies })
    }
}
