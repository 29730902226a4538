//! Weighted envy-graph machinery: WEF-ability decision (longest-path and
//! matching routes), the pointwise-minimal subsidy vector, and the
//! fairness-relaxation checkers WEF(x,y) and WWEF1.

use num_traits::Zero;

use crate::error::Error;
use crate::flow::FlowNetwork;
use crate::model::{Allocation, Instance, SubsidyVector};
use crate::rational::{rat_int, Rational};
use crate::Result;

/// Dense matrix of exact envy costs
/// `cost[i][j] = v_i(X_j)/w_j - v_i(X_i)/w_i`, diagonal fixed to 0.
///
/// Costs are agent-subjective, so no antisymmetry is assumed. An allocation
/// is WEF-able exactly when this graph has no positive-cost cycle.
#[derive(Debug, Clone)]
pub struct EnvyGraph {
    cost: Vec<Vec<Rational>>,
}

/// `values[i][j] = v_i(X_j)`: how agent `i` values each bundle.
pub fn bundle_value_matrix(instance: &Instance, allocation: &Allocation) -> Vec<Vec<Rational>> {
    let n = instance.n();
    let bundles = allocation.bundles();
    (0..n)
        .map(|i| (0..n).map(|j| instance.value(i, &bundles[j])).collect())
        .collect()
}

impl EnvyGraph {
    pub fn build(instance: &Instance, allocation: &Allocation) -> Result<Self> {
        if allocation.n() != instance.n() || allocation.m() != instance.m() {
            return Err(Error::DimensionMismatch(format!(
                "allocation is {}x{}, instance is {}x{}",
                allocation.n(),
                allocation.m(),
                instance.n(),
                instance.m()
            )));
        }
        let values = bundle_value_matrix(instance, allocation);
        Ok(Self::from_bundle_values(&values, instance.weights().as_slice()))
    }

    /// Build from a precomputed bundle-value matrix.
    pub fn from_bundle_values(values: &[Vec<Rational>], weights: &[Rational]) -> Self {
        let n = weights.len();
        let mut cost = vec![vec![Rational::zero(); n]; n];
        for i in 0..n {
            let own = &values[i][i] / &weights[i];
            for j in 0..n {
                if i != j {
                    cost[i][j] = &values[i][j] / &weights[j] - &own;
                }
            }
        }
        Self { cost }
    }

    /// Wrap an explicit cost matrix (used for subsidized envy graphs).
    pub fn from_costs(cost: Vec<Vec<Rational>>) -> Self {
        Self { cost }
    }

    pub fn n(&self) -> usize {
        self.cost.len()
    }

    pub fn cost(&self, i: usize, j: usize) -> &Rational {
        &self.cost[i][j]
    }

    /// Replay a vertex sequence as a closed cycle and sum the edge costs.
    pub fn cycle_cost(&self, cycle: &[usize]) -> Rational {
        let mut total = Rational::zero();
        for k in 0..cycle.len() {
            let a = cycle[k];
            let b = cycle[(k + 1) % cycle.len()];
            total += &self.cost[a][b];
        }
        total
    }

    /// All-pairs maximum walk costs, or a positive-cost cycle witness.
    ///
    /// Runs Floyd-Warshall on the negated costs; a negative diagonal entry
    /// signals a positive cycle, whose witness is recovered by a
    /// Bellman-Ford predecessor walkback and replay-checked before return.
    pub fn longest_paths(&self) -> LongestPaths {
        let n = self.n();
        // shortest paths on negated costs
        let mut dist: Vec<Vec<Rational>> = (0..n)
            .map(|i| (0..n).map(|j| if i == j { Rational::zero() } else { -self.cost[i][j].clone() }).collect())
            .collect();
        for k in 0..n {
            for i in 0..n {
                if i == k {
                    continue;
                }
                let dik = dist[i][k].clone();
                for j in 0..n {
                    let cand = &dik + &dist[k][j];
                    if cand < dist[i][j] {
                        dist[i][j] = cand;
                    }
                }
            }
        }
        if (0..n).any(|i| dist[i][i] < Rational::zero()) {
            let cycle = self.extract_positive_cycle().expect("diagonal is negative, a positive cycle exists");
            let cost = self.cycle_cost(&cycle);
            debug_assert!(cost > Rational::zero());
            return LongestPaths::PositiveCycle { vertices: cycle, cost };
        }
        // negate back to longest-path costs
        for row in &mut dist {
            for d in row.iter_mut() {
                *d = -d.clone();
            }
        }
        LongestPaths::Table(dist)
    }

    /// Bellman-Ford from a virtual source on negated costs; on a round-`n`
    /// relaxation, walks predecessors into the cycle and returns it in
    /// forward edge order. Candidates are replay-validated.
    fn extract_positive_cycle(&self) -> Option<Vec<usize>> {
        let n = self.n();
        let mut dist = vec![Rational::zero(); n];
        let mut parent: Vec<Option<usize>> = vec![None; n];
        let mut last_relaxed = None;
        for _round in 0..=n {
            last_relaxed = None;
            for i in 0..n {
                for j in 0..n {
                    if i == j {
                        continue;
                    }
                    let cand = &dist[i] - &self.cost[i][j];
                    if cand < dist[j] {
                        dist[j] = cand;
                        parent[j] = Some(i);
                        last_relaxed = Some(j);
                    }
                }
            }
            last_relaxed?;
        }
        let mut x = last_relaxed?;
        for _ in 0..n {
            x = parent[x]?;
        }
        let mut seen = vec![false; n];
        let mut walk = Vec::new();
        let mut cur = x;
        while !seen[cur] {
            seen[cur] = true;
            walk.push(cur);
            cur = parent[cur]?;
        }
        let start = walk.iter().position(|&v| v == cur)?;
        let mut cycle: Vec<usize> = walk[start..].to_vec();
        cycle.reverse(); // parent pointers run against edge direction
        if self.cycle_cost(&cycle) > Rational::zero() {
            Some(cycle)
        } else {
            None
        }
    }
}

/// Outcome of the all-pairs longest-path computation.
pub enum LongestPaths {
    /// `table[i][j]` is the maximum cost of a walk from `i` to `j`
    /// (`table[i][i] = 0` via the trivial walk).
    Table(Vec<Vec<Rational>>),
    PositiveCycle { vertices: Vec<usize>, cost: Rational },
}

/// How to decide WEF-ability.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum WefMethod {
    /// All-pairs longest paths with positive-cycle detection.
    Cycle,
    /// Compare the identity assignment against a maximum-weight perfect
    /// matching on the `n x n` matrix with entries `v_i(X_j)/w_j`.
    Matching,
}

/// Certificate returned by the WEF-ability check.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum WefabilityCertificate {
    /// WEF-able; carries the maximum path cost `l_i(X)` from each agent.
    Stable { longest_path_costs: Vec<Rational> },
    /// Not WEF-able; the vertex sequence replays to a strictly positive sum.
    PositiveCycle { vertices: Vec<usize>, cost: Rational },
}

impl WefabilityCertificate {
    pub fn is_stable(&self) -> bool {
        matches!(self, Self::Stable { .. })
    }
}

/// `l_i = max(0, max_j table[i][j])` for each source.
fn path_costs_from_table(table: &[Vec<Rational>]) -> Vec<Rational> {
    table
        .iter()
        .map(|row| row.iter().cloned().fold(Rational::zero(), |acc, d| if d > acc { d } else { acc }))
        .collect()
}

/// Decide whether `allocation` is WEF-able and return a certificate.
pub fn wefability(instance: &Instance, allocation: &Allocation, method: WefMethod) -> Result<WefabilityCertificate> {
    let graph = EnvyGraph::build(instance, allocation)?;
    match method {
        WefMethod::Cycle => Ok(match graph.longest_paths() {
            LongestPaths::Table(table) => WefabilityCertificate::Stable {
                longest_path_costs: path_costs_from_table(&table),
            },
            LongestPaths::PositiveCycle { vertices, cost } => {
                WefabilityCertificate::PositiveCycle { vertices, cost }
            }
        }),
        WefMethod::Matching => matching_certificate(instance, allocation, &graph),
    }
}

/// Matching route: the identity assignment is optimal iff no bundle
/// permutation improves `sum v_i(X_{pi(i)})/w_{pi(i)}`, which is the
/// reassignment-stability condition. On instability the optimal permutation
/// decomposes into cycles, at least one of which is positive in the envy
/// graph; the first one (lowest starting vertex) is returned.
fn matching_certificate(
    instance: &Instance,
    allocation: &Allocation,
    graph: &EnvyGraph,
) -> Result<WefabilityCertificate> {
    let n = instance.n();
    let values = bundle_value_matrix(instance, allocation);
    let weights = instance.weights();

    // assignment problem as min-cost max-flow on negated entries
    let nodes = 2 + 2 * n;
    let (source, sink) = (0, nodes - 1);
    let mut net = FlowNetwork::new(nodes, source, sink);
    for i in 0..n {
        net.add_arc(source, 1 + i, 1, Rational::zero());
    }
    for i in 0..n {
        for j in 0..n {
            let entry = &values[i][j] / weights.get(j);
            net.add_arc(1 + i, 1 + n + j, 1, -entry);
        }
    }
    for j in 0..n {
        net.add_arc(1 + n + j, sink, 1, Rational::zero());
    }
    let flow = net.min_cost_max_flow()?;
    debug_assert_eq!(flow.value as usize, n);
    let optimum = -flow.cost;
    let identity: Rational = (0..n).map(|i| &values[i][i] / weights.get(i)).sum();

    if identity >= optimum {
        // Stable; the longest-path costs are well defined and are the only
        // payload that certifies the decision for downstream use.
        match graph.longest_paths() {
            LongestPaths::Table(table) => Ok(WefabilityCertificate::Stable {
                longest_path_costs: path_costs_from_table(&table),
            }),
            LongestPaths::PositiveCycle { .. } => unreachable!("matching found no improving permutation"),
        }
    } else {
        // recover the permutation from the matching arcs
        let mut perm = vec![usize::MAX; n];
        let mut arc_idx = n; // agent->slot arcs start after the n source arcs
        for i in 0..n {
            for j in 0..n {
                if flow.flows[arc_idx] == 1 {
                    perm[i] = j;
                }
                arc_idx += 1;
            }
        }
        let mut seen = vec![false; n];
        for start in 0..n {
            if seen[start] || perm[start] == start {
                continue;
            }
            let mut cycle = Vec::new();
            let mut cur = start;
            while !seen[cur] {
                seen[cur] = true;
                cycle.push(cur);
                cur = perm[cur];
            }
            let cost = graph.cycle_cost(&cycle);
            if cost > Rational::zero() {
                return Ok(WefabilityCertificate::PositiveCycle { vertices: cycle, cost });
            }
        }
        unreachable!("an improving permutation contains a positive-cost cycle")
    }
}

/// The pointwise-minimal subsidy vector `p*_i = w_i * l_i(X)` for a WEF-able
/// allocation. `(X, p*)` is WEF, at least one entry is zero, and any other
/// WEF subsidy vector dominates it componentwise.
pub fn min_subsidy_vector(instance: &Instance, allocation: &Allocation) -> Result<SubsidyVector> {
    let graph = EnvyGraph::build(instance, allocation)?;
    match graph.longest_paths() {
        LongestPaths::Table(table) => {
            let costs = path_costs_from_table(&table);
            let amounts = costs
                .into_iter()
                .enumerate()
                .map(|(i, l)| instance.weights().get(i) * l)
                .collect();
            SubsidyVector::new(amounts)
        }
        LongestPaths::PositiveCycle { vertices, .. } => Err(Error::NotWefable { cycle: vertices }),
    }
}

/// Exact WEF test: `(v_i(X_i)+p_i)/w_i >= (v_i(X_j)+p_j)/w_j` for all ordered pairs.
pub fn is_wef(instance: &Instance, allocation: &Allocation, subsidies: &SubsidyVector) -> bool {
    let n = instance.n();
    let values = bundle_value_matrix(instance, allocation);
    let w = instance.weights();
    for i in 0..n {
        let own = (&values[i][i] + subsidies.get(i)) / w.get(i);
        for j in 0..n {
            if i == j {
                continue;
            }
            let other = (&values[i][j] + subsidies.get(j)) / w.get(j);
            if own < other {
                return false;
            }
        }
    }
    true
}

fn require_additive_class(instance: &Instance) -> Result<()> {
    if instance.valuations().is_additive_class() {
        Ok(())
    } else {
        Err(Error::UnsupportedProfile {
            expected: "an additive-class profile",
            got: instance.valuations().variant_name(),
        })
    }
}

/// WEF(x,y) for `x, y` in `[0,1]`: for every ordered pair there is a bundle
/// `B ⊆ X_j` with `|B| <= 1` such that
/// `(v_i(X_i) + y*v_i(B))/w_i >= (v_i(X_j) - x*v_i(B))/w_j`.
/// The "there exists" is an explicit scan over `B = ∅` and every singleton.
pub fn check_wef_xy(instance: &Instance, allocation: &Allocation, x: &Rational, y: &Rational) -> Result<bool> {
    require_additive_class(instance)?;
    for r in [x, y] {
        if r < &Rational::zero() || r > &rat_int(1) {
            return Err(Error::Parse(format!("WEF(x,y) parameters must lie in [0,1], got {r}")));
        }
    }
    let n = instance.n();
    let bundles = allocation.bundles();
    let w = instance.weights();
    for i in 0..n {
        let own = instance.value(i, &bundles[i]);
        for j in 0..n {
            if i == j {
                continue;
            }
            let other = instance.value(i, &bundles[j]);
            let mut ok = &own / w.get(i) >= &other / w.get(j); // B = empty
            if !ok {
                for &o in &bundles[j] {
                    let b = instance.value(i, &[o]);
                    let lhs = (&own + y * &b) / w.get(i);
                    let rhs = (&other - x * &b) / w.get(j);
                    if lhs >= rhs {
                        ok = true;
                        break;
                    }
                }
            }
            if !ok {
                return Ok(false);
            }
        }
    }
    Ok(true)
}

/// Weak weighted envy-freeness up to one item: for every pair with
/// `X_j != ∅` some `o in X_j` satisfies the removal or the addition condition.
pub fn check_wwef1(instance: &Instance, allocation: &Allocation) -> Result<bool> {
    require_additive_class(instance)?;
    let n = instance.n();
    let bundles = allocation.bundles();
    let w = instance.weights();
    for i in 0..n {
        let own = instance.value(i, &bundles[i]);
        for j in 0..n {
            if i == j || bundles[j].is_empty() {
                continue;
            }
            let other = instance.value(i, &bundles[j]);
            let mut ok = false;
            for &o in &bundles[j] {
                let item = instance.value(i, &[o]);
                let removal = &own / w.get(i) >= (&other - &item) / w.get(j);
                let addition = (&own + &item) / w.get(i) >= &other / w.get(j);
                if removal || addition {
                    ok = true;
                    break;
                }
            }
            if !ok {
                return Ok(false);
            }
        }
    }
    Ok(true)
}
