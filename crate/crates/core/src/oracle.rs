//! Exhaustive ground-truth engines.
//!
//! The global minimum-subsidy search enumerates every complete allocation
//! (the exact counterpart of the experiments' integer program: per-allocation
//! the pointwise-minimal subsidy vector is optimal, so the minimum over
//! allocations is the program optimum). Also: the permutation-based
//! reassignment-stability check, simple-path longest paths, and efficiency
//! predicates. Everything here is deliberately brute force; the point is to
//! certify the polynomial algorithms on small instances.

use num_bigint::BigInt;
use num_traits::{Signed, Zero};

use crate::envy::{wefability, EnvyGraph, LongestPaths, WefMethod, WefabilityCertificate};
use crate::error::Error;
use crate::model::{Allocation, Instance, SubsidyVector, ValuationProfile};
use crate::rational::{lcm_all, rat_int, to_i64, Rational};
use crate::Result;

/// Upper bound on the number of candidates an exhaustive search may visit.
pub const ENUMERATION_GUARD: u128 = 10_000_000;

/// Search statistics for an exhaustive run.
#[derive(Debug, Clone, Default)]
pub struct SearchStats {
    /// Distinct candidate allocations evaluated. For identical-items and
    /// capped profiles the search runs over item-count vectors, so this is
    /// the number of count vectors rather than raw owner vectors.
    pub candidates: u64,
    /// How many candidates were WEF-able.
    pub wefable: u64,
}

/// Optimum of the exhaustive minimum-subsidy search.
#[derive(Debug, Clone)]
pub struct OracleResult {
    /// Lexicographically-first optimal allocation (owner-vector order).
    pub allocation: Allocation,
    pub subsidies: SubsidyVector,
    pub total: Rational,
    pub stats: SearchStats,
}

/// Global minimum total subsidy over every complete allocation.
pub fn min_total_subsidy_exhaustive(instance: &Instance) -> Result<OracleResult> {
    search(instance, false)?.ok_or_else(|| unreachable!("all-to-best is always WEF-able"))
}

/// Same search restricted to non-wasteful allocations. `None` when no
/// non-wasteful allocation is WEF-able (the two properties are incompatible
/// in general).
pub fn min_total_subsidy_non_wasteful(instance: &Instance) -> Result<Option<OracleResult>> {
    search(instance, true)
}

fn search(instance: &Instance, non_wasteful_only: bool) -> Result<Option<OracleResult>> {
    match instance.valuations() {
        ValuationProfile::IdenticalItems { .. } | ValuationProfile::Capped { .. } => {
            counts_search(instance, non_wasteful_only)
        }
        _ => {
            let combos = (instance.n() as u128).checked_pow(instance.m() as u32);
            match combos {
                Some(c) if c <= ENUMERATION_GUARD => {}
                _ => {
                    return Err(Error::TooLarge(format!(
                        "{}^{} owner vectors exceed the {} guard",
                        instance.n(),
                        instance.m(),
                        ENUMERATION_GUARD
                    )))
                }
            }
            if let Some(fast) = IntegerSearch::try_new(instance) {
                fast.run(non_wasteful_only)
            } else {
                generic_search(instance, non_wasteful_only)
            }
        }
    }
}

/// Total of `p*` for an allocation given its bundle-value matrix, or `None`
/// when a positive cycle exists.
fn subsidy_total_from_values(values: &[Vec<Rational>], weights: &[Rational]) -> Option<(Rational, Vec<Rational>)> {
    let graph = EnvyGraph::from_bundle_values(values, weights);
    match graph.longest_paths() {
        LongestPaths::Table(table) => {
            let mut total = Rational::zero();
            let mut amounts = Vec::with_capacity(weights.len());
            for (i, row) in table.iter().enumerate() {
                let l = row.iter().cloned().fold(Rational::zero(), |acc, d| if d > acc { d } else { acc });
                let p = &weights[i] * l;
                total += &p;
                amounts.push(p);
            }
            Some((total, amounts))
        }
        LongestPaths::PositiveCycle { .. } => None,
    }
}

fn generic_search(instance: &Instance, non_wasteful_only: bool) -> Result<Option<OracleResult>> {
    let n = instance.n();
    let m = instance.m();
    let weights = instance.weights().as_slice();
    let mut owners = vec![0usize; m];
    let mut stats = SearchStats::default();
    let mut best: Option<(Rational, Vec<usize>, Vec<Rational>)> = None;

    loop {
        stats.candidates += 1;
        let alloc = Allocation::from_owners(owners.clone(), n).expect("owners in range");
        let acceptable = !non_wasteful_only || is_non_wasteful(instance, &alloc);
        if acceptable {
            let values = crate::envy::bundle_value_matrix(instance, &alloc);
            if let Some((total, amounts)) = subsidy_total_from_values(&values, weights) {
                stats.wefable += 1;
                if best.as_ref().is_none_or(|(b, _, _)| total < *b) {
                    best = Some((total, owners.clone(), amounts));
                }
            }
        }
        if !next_owner_vector(&mut owners, n) {
            break;
        }
    }
    Ok(best.map(|(total, owners, amounts)| OracleResult {
        allocation: Allocation::from_owners(owners, n).expect("valid"),
        subsidies: SubsidyVector::new(amounts).expect("non-negative"),
        total,
        stats,
    }))
}

/// Advance the owner vector in lexicographic order; false when exhausted.
fn next_owner_vector(owners: &mut [usize], n: usize) -> bool {
    for slot in owners.iter_mut().rev() {
        *slot += 1;
        if *slot < n {
            return true;
        }
        *slot = 0;
    }
    false
}

/// Integer-scaled search for additive-class profiles whose values and
/// weights clear to machine integers: the envy costs, scaled by the lcm of
/// the normalized weights, stay integral, so the inner Floyd-Warshall runs
/// on `i64` instead of big rationals. Exact as long as the precomputed
/// magnitude bound fits; otherwise the caller falls back to the generic
/// path.
struct IntegerSearch<'a> {
    instance: &'a Instance,
    /// `a[i][o]`: scaled integer value of item `o` for agent `i`.
    item_values: Vec<Vec<i64>>,
    /// normalized integer weights
    weights: Vec<i64>,
    /// `L / w_j` for the lcm `L` of the weights
    weight_factor: Vec<i64>,
    /// items some agent values positively (for the non-wasteful filter)
    liked: Vec<bool>,
}

impl<'a> IntegerSearch<'a> {
    fn try_new(instance: &'a Instance) -> Option<Self> {
        if !instance.valuations().is_additive_class() {
            return None;
        }
        let n = instance.n();
        let m = instance.m();
        let norm = instance.weights().gcd_normalized();
        let weights: Vec<i64> = norm.as_slice().iter().map(to_i64).collect::<Option<_>>()?;
        let lcm = lcm_all(&weights.iter().map(|&w| BigInt::from(w)).collect::<Vec<_>>());
        let lcm_i: i64 = lcm.clone().try_into().ok()?;
        let weight_factor: Vec<i64> = weights.iter().map(|&w| lcm_i / w).collect();

        // clear value denominators
        let mut denoms = Vec::new();
        for i in 0..n {
            for o in 0..m {
                denoms.push(instance.valuations().item_value(i, o).denom().clone());
            }
        }
        let value_scale = lcm_all(&denoms);
        let mut item_values = vec![vec![0i64; m]; n];
        let mut max_value: i64 = 0;
        for i in 0..n {
            for o in 0..m {
                let v = instance.valuations().item_value(i, o);
                let scaled = v.numer() * (&value_scale / v.denom());
                let as_i64: i64 = scaled.try_into().ok()?;
                max_value = max_value.max(as_i64);
                item_values[i][o] = as_i64;
            }
        }

        // conservative magnitude bound: paths of <= n edges of scaled costs
        let edge_bound = 2i128 * lcm_i as i128 * max_value as i128 * m as i128;
        let path_bound = edge_bound * n as i128;
        let total_bound = path_bound * weights.iter().map(|&w| w as i128).sum::<i128>();
        if total_bound >= (i64::MAX / 4) as i128 {
            return None;
        }

        let liked = (0..m)
            .map(|o| (0..n).any(|i| item_values[i][o] > 0))
            .collect();
        Some(Self { instance, item_values, weights, weight_factor, liked })
    }

    fn run(&self, non_wasteful_only: bool) -> Result<Option<OracleResult>> {
        let n = self.instance.n();
        let m = self.instance.m();
        let mut owners = vec![0usize; m];
        // bundle_sums[i][j] = scaled v_i(X_j)
        let mut bundle_sums = vec![vec![0i64; n]; n];
        for o in 0..m {
            for i in 0..n {
                bundle_sums[i][0] += self.item_values[i][o];
            }
        }
        let mut stats = SearchStats::default();
        let mut best: Option<(i64, Vec<usize>)> = None;
        let mut cost = vec![vec![0i64; n]; n];
        let mut fw = vec![vec![0i64; n]; n];

        'outer: loop {
            stats.candidates += 1;
            let acceptable = !non_wasteful_only
                || owners
                    .iter()
                    .enumerate()
                    .all(|(o, &holder)| self.item_values[holder][o] > 0 || !self.liked[o]);
            if acceptable {
                if let Some(total) = self.evaluate(&bundle_sums, &mut cost, &mut fw) {
                    stats.wefable += 1;
                    if best.as_ref().is_none_or(|(b, _)| total < *b) {
                        best = Some((total, owners.clone()));
                    }
                }
            }
            // lexicographic odometer with incremental bundle sums
            for slot in (0..m).rev() {
                let old = owners[slot];
                if old + 1 < n {
                    owners[slot] += 1;
                    for i in 0..n {
                        bundle_sums[i][old] -= self.item_values[i][slot];
                        bundle_sums[i][old + 1] += self.item_values[i][slot];
                    }
                    continue 'outer;
                }
                owners[slot] = 0;
                for i in 0..n {
                    bundle_sums[i][old] -= self.item_values[i][slot];
                    bundle_sums[i][0] += self.item_values[i][slot];
                }
            }
            break;
        }

        Ok(best.map(|(_, owners)| {
            let allocation = Allocation::from_owners(owners, n).expect("valid");
            let subsidies = crate::envy::min_subsidy_vector(self.instance, &allocation)
                .expect("best candidate is WEF-able");
            let total = subsidies.total();
            OracleResult { allocation, subsidies, total, stats }
        }))
    }

    /// Scaled total subsidy `sum_i w_i * l_i` if WEF-able, else `None`.
    fn evaluate(&self, sums: &[Vec<i64>], cost: &mut [Vec<i64>], fw: &mut [Vec<i64>]) -> Option<i64> {
        let n = self.weights.len();
        for i in 0..n {
            let own = self.weight_factor[i] * sums[i][i];
            for j in 0..n {
                cost[i][j] = if i == j { 0 } else { self.weight_factor[j] * sums[i][j] - own };
            }
        }
        // positive 2-cycles reject most candidates cheaply
        for i in 0..n {
            for j in (i + 1)..n {
                if cost[i][j] + cost[j][i] > 0 {
                    return None;
                }
            }
        }
        for i in 0..n {
            fw[i].copy_from_slice(&cost[i]);
            fw[i][i] = 0;
        }
        for k in 0..n {
            for i in 0..n {
                if i == k {
                    continue;
                }
                let fik = fw[i][k];
                for j in 0..n {
                    let cand = fik + fw[k][j];
                    if cand > fw[i][j] {
                        fw[i][j] = cand;
                    }
                }
                if fw[i][i] > 0 {
                    return None;
                }
            }
        }
        let mut total = 0i64;
        for i in 0..n {
            let l = fw[i].iter().copied().max().unwrap_or(0).max(0);
            total += self.weights[i] * l;
        }
        Some(total)
    }
}

/// For identical-items and capped profiles the envy graph depends only on
/// the bundle sizes, so the search enumerates item-count vectors. Counts are
/// visited so that their canonical (block) owner vectors appear in
/// lexicographic order, matching the generic path's tie-breaking.
fn counts_search(instance: &Instance, non_wasteful_only: bool) -> Result<Option<OracleResult>> {
    let n = instance.n();
    let m = instance.m();
    let combos = compositions_count(m, n);
    if combos > ENUMERATION_GUARD {
        return Err(Error::TooLarge(format!(
            "{combos} count vectors exceed the {ENUMERATION_GUARD} guard"
        )));
    }
    let weights = instance.weights().as_slice();
    let mut stats = SearchStats::default();
    let mut best: Option<(Rational, Vec<usize>, Vec<Rational>)> = None;

    let mut counts = vec![0usize; n];
    visit_compositions(m, 0, &mut counts, &mut |counts: &[usize]| {
        stats.candidates += 1;
        if non_wasteful_only && !counts_non_wasteful(instance, counts) {
            return;
        }
        let values: Vec<Vec<Rational>> = (0..n)
            .map(|i| (0..n).map(|j| bundle_value_of_count(instance, i, counts[j])).collect())
            .collect();
        if let Some((total, amounts)) = subsidy_total_from_values(&values, weights) {
            stats.wefable += 1;
            if best.as_ref().is_none_or(|(b, _, _)| total < *b) {
                best = Some((total, counts.to_vec(), amounts));
            }
        }
    });

    Ok(best.map(|(total, counts, amounts)| OracleResult {
        allocation: Allocation::from_counts(&counts),
        subsidies: SubsidyVector::new(amounts).expect("non-negative"),
        total,
        stats,
    }))
}

/// Visit compositions of `m` into `n` parts; earlier agents take larger
/// counts first so canonical owner vectors come out in lexicographic order.
fn visit_compositions(remaining: usize, agent: usize, counts: &mut Vec<usize>, f: &mut impl FnMut(&[usize])) {
    let n = counts.len();
    if agent == n - 1 {
        counts[agent] = remaining;
        f(counts);
        return;
    }
    for c in (0..=remaining).rev() {
        counts[agent] = c;
        visit_compositions(remaining - c, agent + 1, counts, f);
    }
}

fn compositions_count(m: usize, n: usize) -> u128 {
    // C(m + n - 1, n - 1)
    let mut result: u128 = 1;
    for k in 1..=(n - 1) as u128 {
        result = result.saturating_mul(m as u128 + k) / k;
        if result > ENUMERATION_GUARD * 2 {
            return result;
        }
    }
    result
}

fn bundle_value_of_count(instance: &Instance, agent: usize, count: usize) -> Rational {
    match instance.valuations() {
        ValuationProfile::IdenticalItems { per_agent, .. } => &per_agent[agent] * rat_int(count as i64),
        ValuationProfile::Capped { caps, .. } => {
            let size = rat_int(count as i64);
            if caps[agent] < size {
                caps[agent].clone()
            } else {
                size
            }
        }
        _ => unreachable!("counts search only runs on count-determined profiles"),
    }
}

fn counts_non_wasteful(instance: &Instance, counts: &[usize]) -> bool {
    let n = counts.len();
    for i in 0..n {
        if counts[i] == 0 {
            continue;
        }
        let whole = bundle_value_of_count(instance, i, counts[i]);
        let smaller = bundle_value_of_count(instance, i, counts[i] - 1);
        if whole == smaller {
            for j in 0..n {
                if j == i {
                    continue;
                }
                let grown = bundle_value_of_count(instance, j, counts[j] + 1);
                let now = bundle_value_of_count(instance, j, counts[j]);
                if grown != now {
                    return false;
                }
            }
        }
    }
    true
}

/// Inequality (weighted reassignment-stability) over all `n!` permutations.
pub fn reassignment_stable_bruteforce(instance: &Instance, allocation: &Allocation) -> Result<bool> {
    let n = instance.n();
    if n > 8 {
        return Err(Error::TooLarge(format!("{n}! permutations exceed the n <= 8 guard")));
    }
    let values = crate::envy::bundle_value_matrix(instance, allocation);
    let w = instance.weights();
    let ratio: Vec<Vec<Rational>> = (0..n)
        .map(|i| (0..n).map(|j| &values[i][j] / w.get(j)).collect())
        .collect();
    let base: Rational = (0..n).map(|i| ratio[i][i].clone()).sum();

    let mut perm: Vec<usize> = (0..n).collect();
    let mut stable = true;
    permute(&mut perm, 0, &mut |p: &[usize]| {
        let total: Rational = (0..n).map(|i| ratio[i][p[i]].clone()).sum();
        if total > base {
            stable = false;
        }
    });
    Ok(stable)
}

fn permute(items: &mut Vec<usize>, k: usize, f: &mut impl FnMut(&[usize])) {
    if k == items.len() {
        f(items);
        return;
    }
    for i in k..items.len() {
        items.swap(k, i);
        permute(items, k + 1, f);
        items.swap(k, i);
    }
}

/// Maximum cost over all simple paths starting at `source` (the empty path
/// counts as 0). Errors when the envy graph has a positive cycle.
pub fn longest_simple_path_bruteforce(instance: &Instance, allocation: &Allocation, source: usize) -> Result<Rational> {
    let n = instance.n();
    if n > 8 {
        return Err(Error::TooLarge(format!("simple-path enumeration capped at n <= 8, got {n}")));
    }
    match wefability(instance, allocation, WefMethod::Cycle)? {
        WefabilityCertificate::PositiveCycle { vertices, .. } => Err(Error::NotWefable { cycle: vertices }),
        WefabilityCertificate::Stable { .. } => {
            let graph = EnvyGraph::build(instance, allocation)?;
            let mut visited = vec![false; n];
            visited[source] = true;
            let mut best = Rational::zero();
            dfs_longest(&graph, source, &Rational::zero(), &mut visited, &mut best);
            Ok(best)
        }
    }
}

fn dfs_longest(graph: &EnvyGraph, at: usize, cost: &Rational, visited: &mut Vec<bool>, best: &mut Rational) {
    if cost > best {
        *best = cost.clone();
    }
    for next in 0..graph.n() {
        if !visited[next] {
            visited[next] = true;
            let extended = cost + graph.cost(at, next);
            dfs_longest(graph, next, &extended, visited, best);
            visited[next] = false;
        }
    }
}

/// Exact efficiency predicates for one allocation.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EfficiencyReport {
    pub non_wasteful: bool,
    pub pareto_efficient: bool,
    pub msw: bool,
    pub nonzero_welfare: bool,
}

/// No single-item transfer is a Pareto improvement.
pub fn is_non_wasteful(instance: &Instance, allocation: &Allocation) -> bool {
    let bundles = allocation.bundles();
    let n = instance.n();
    for i in 0..n {
        let own = instance.value(i, &bundles[i]);
        for &o in &bundles[i] {
            let without: Vec<usize> = bundles[i].iter().copied().filter(|&x| x != o).collect();
            if instance.value(i, &without) == own {
                for j in 0..n {
                    if j == i {
                        continue;
                    }
                    let mut grown = bundles[j].clone();
                    grown.push(o);
                    if instance.value(j, &grown) != instance.value(j, &bundles[j]) {
                        return false;
                    }
                }
            }
        }
    }
    true
}

/// Evaluates non-wastefulness directly and Pareto efficiency, social-welfare
/// maximality and the non-zero-welfare property by enumeration.
pub fn efficiency_predicates(instance: &Instance, allocation: &Allocation) -> Result<EfficiencyReport> {
    let n = instance.n();
    let m = instance.m();
    let combos = (n as u128).checked_pow(m as u32);
    match combos {
        Some(c) if c <= ENUMERATION_GUARD => {}
        _ => return Err(Error::TooLarge(format!("{n}^{m} owner vectors exceed the enumeration guard"))),
    }

    let non_wasteful = is_non_wasteful(instance, allocation);
    let bundles = allocation.bundles();
    let utilities: Vec<Rational> = (0..n).map(|i| instance.value(i, &bundles[i])).collect();
    let welfare: Rational = utilities.iter().sum();

    let mut max_welfare = Rational::zero();
    let mut dominated = false;
    let mut owners = vec![0usize; m];
    loop {
        let alloc = Allocation::from_owners(owners.clone(), n).expect("valid");
        let other = alloc.bundles();
        let mut total = Rational::zero();
        let mut ge_all = true;
        let mut gt_some = false;
        for i in 0..n {
            let u = instance.value(i, &other[i]);
            match u.cmp(&utilities[i]) {
                std::cmp::Ordering::Less => ge_all = false,
                std::cmp::Ordering::Greater => gt_some = true,
                std::cmp::Ordering::Equal => {}
            }
            total += u;
        }
        if ge_all && gt_some {
            dominated = true;
        }
        if total > max_welfare {
            max_welfare = total;
        }
        if !next_owner_vector(&mut owners, n) {
            break;
        }
    }

    Ok(EfficiencyReport {
        non_wasteful,
        pareto_efficient: !dominated,
        msw: welfare == max_welfare,
        nonzero_welfare: welfare.is_positive() || max_welfare.is_zero(),
    })
}
