//! Budget-constrained subsidy distribution.
//!
//! Given a WEF-able allocation and a budget `d`, produce subsidies summing
//! to exactly `d` such that only never-envied agents receive money (MWEF).
//! When `d` covers the WEF requirement `sum_i w_i l_i(X)` the split is `p*`
//! plus any surplus in proportion to the weights; below it, money is poured
//! into the set of agents at the maximum envy level (water-filling),
//! proportionally to their weights, growing the set whenever an outside
//! agent's level catches up.
//!
//! The parametric step exploits a telescoping identity: adding subsidies
//! shifts the cost of any path by `p_end/w_end - p_start/w_start`, so with
//! `q_i = p_i / w_i` the level of agent `i` is
//! `l_i(q) = max_j (D[i][j] + q_j) - q_i` for the constant all-pairs
//! longest-path matrix `D` of the unsubsidized graph. Within one phase every
//! level is the upper envelope of two lines in the poured amount, and the
//! next event is an exact line intersection; no bisection is involved.

use num_traits::{Signed, Zero};

use crate::envy::{EnvyGraph, LongestPaths};
use crate::error::Error;
use crate::model::{Allocation, Instance, SubsidyVector};
use crate::rational::{format_rational, Rational};
use crate::Result;

/// Subsidy split under a budget.
#[derive(Debug, Clone)]
pub struct BudgetedOutcome {
    pub subsidies: SubsidyVector,
    /// Final `l_i(X, p)` per agent.
    pub levels: Vec<Rational>,
    /// Water-filling events: cumulative budget spent when each group of
    /// agents joined the receiving set (the first entry is the initial set).
    pub events: Vec<BudgetEvent>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BudgetEvent {
    pub spent: Rational,
    pub joined: Vec<usize>,
}

/// The envy graph with subsidies folded in:
/// `cost(i,j) = (v_i(X_j)+p_j)/w_j - (v_i(X_i)+p_i)/w_i`.
/// Reduces to the plain envy graph at `p = 0`.
pub fn subsidized_envy_graph(
    instance: &Instance,
    allocation: &Allocation,
    subsidies: &SubsidyVector,
) -> Result<EnvyGraph> {
    let n = instance.n();
    let values = crate::envy::bundle_value_matrix(instance, allocation);
    let w = instance.weights();
    let mut cost = vec![vec![Rational::zero(); n]; n];
    for i in 0..n {
        let own = (&values[i][i] + subsidies.get(i)) / w.get(i);
        for j in 0..n {
            if i != j {
                cost[i][j] = (&values[i][j] + subsidies.get(j)) / w.get(j) - &own;
            }
        }
    }
    Ok(EnvyGraph::from_costs(cost))
}

/// MWEF predicate: agents receiving money have no incoming strictly
/// positive envy edge.
pub fn is_mwef(instance: &Instance, allocation: &Allocation, subsidies: &SubsidyVector) -> Result<bool> {
    let graph = subsidized_envy_graph(instance, allocation, subsidies)?;
    let n = instance.n();
    for j in 0..n {
        if subsidies.get(j).is_positive() {
            for i in 0..n {
                if i != j && graph.cost(i, j).is_positive() {
                    return Ok(false);
                }
            }
        }
    }
    Ok(true)
}

/// Split a budget of exactly `d` over a WEF-able allocation so the outcome
/// is MWEF; at `d >= sum w_i l_i(X)` the outcome is fully WEF.
pub fn distribute_budget(instance: &Instance, allocation: &Allocation, d: &Rational) -> Result<BudgetedOutcome> {
    if d.is_negative() {
        return Err(Error::NegativeBudget(format_rational(d)));
    }
    let graph = EnvyGraph::build(instance, allocation)?;
    let dmat = match graph.longest_paths() {
        LongestPaths::Table(t) => t,
        LongestPaths::PositiveCycle { vertices, .. } => return Err(Error::NotWefable { cycle: vertices }),
    };
    let n = instance.n();
    let w = instance.weights();
    let base_levels: Vec<Rational> = dmat
        .iter()
        .map(|row| row.iter().max().expect("n >= 1").clone())
        .collect();
    let requirement: Rational = (0..n).map(|i| w.get(i) * &base_levels[i]).sum();

    if *d >= requirement {
        // p* plus surplus in proportion to the weights
        let surplus = d - &requirement;
        let total_w = w.total();
        let amounts: Vec<Rational> = (0..n)
            .map(|i| w.get(i) * &base_levels[i] + &surplus * w.get(i) / &total_w)
            .collect();
        let subsidies = SubsidyVector::new(amounts)?;
        let levels = levels_for(&dmat, w.as_slice(), &subsidies);
        debug_assert!(levels.iter().all(|l| l.is_zero()));
        return Ok(BudgetedOutcome { subsidies, levels, events: Vec::new() });
    }

    // water-filling: q_i = p_i / w_i
    let mut q = vec![Rational::zero(); n];
    let mut member = vec![false; n];
    let mut remaining = d.clone();
    let mut spent = Rational::zero();
    let mut events = Vec::new();

    let top = base_levels.iter().max().expect("n >= 1").clone();
    let initial: Vec<usize> = (0..n).filter(|&i| base_levels[i] == top).collect();
    for &i in &initial {
        member[i] = true;
    }
    let mut common = top;
    events.push(BudgetEvent { spent: spent.clone(), joined: initial });

    while remaining.is_positive() {
        let pool_weight: Rational = (0..n).filter(|&k| member[k]).map(|k| w.get(k)).sum();

        // next event: the earliest budget at which an outside level meets the
        // common level
        let mut next: Option<(Rational, Vec<usize>)> = None;
        for j in 0..n {
            if member[j] {
                continue;
            }
            // level_j(delta) = max(inside_j - q_j + delta/W*, outside_j - q_j)
            // common(delta)  = common - delta/W*
            let inside_j = (0..n)
                .filter(|&k| member[k])
                .map(|k| &dmat[j][k] + &q[k])
                .max()
                .expect("members exist");
            let outside_j = (0..n)
                .filter(|&k| !member[k])
                .map(|k| &dmat[j][k] + &q[k])
                .max()
                .expect("j itself is outside");
            let gap_inside = &common - (&inside_j - &q[j]);
            let gap_outside = &common - (&outside_j - &q[j]);
            debug_assert!(gap_inside.is_positive() && gap_outside.is_positive());
            let delta_inside = &gap_inside * &pool_weight / crate::rational::rat_int(2);
            let delta_outside = &gap_outside * &pool_weight;
            let delta = delta_inside.min(delta_outside);
            match &mut next {
                None => next = Some((delta, vec![j])),
                Some((best, joined)) => {
                    if delta < *best {
                        *best = delta;
                        *joined = vec![j];
                    } else if delta == *best {
                        joined.push(j);
                    }
                }
            }
        }

        let pour = match &next {
            Some((delta, _)) if *delta < remaining => delta.clone(),
            _ => remaining.clone(),
        };
        for k in 0..n {
            if member[k] {
                q[k] += &pour / &pool_weight;
            }
        }
        common -= &pour / &pool_weight;
        spent += &pour;
        remaining -= &pour;

        if remaining.is_positive() {
            let (_, joined) = next.expect("pour was capped by an event");
            for &j in &joined {
                member[j] = true;
            }
            events.push(BudgetEvent { spent: spent.clone(), joined });
        }
    }

    let amounts: Vec<Rational> = (0..n).map(|i| &q[i] * w.get(i)).collect();
    let subsidies = SubsidyVector::new(amounts)?;
    debug_assert_eq!(subsidies.total(), *d);
    let levels = levels_for(&dmat, w.as_slice(), &subsidies);
    Ok(BudgetedOutcome { subsidies, levels, events })
}

/// `l_i(p) = max_j (D[i][j] + p_j/w_j) - p_i/w_i`.
fn levels_for(dmat: &[Vec<Rational>], weights: &[Rational], subsidies: &SubsidyVector) -> Vec<Rational> {
    let n = weights.len();
    let q: Vec<Rational> = (0..n).map(|i| subsidies.get(i) / &weights[i]).collect();
    (0..n)
        .map(|i| {
            (0..n)
                .map(|j| &dmat[i][j] + &q[j])
                .max()
                .expect("n >= 1")
                - &q[i]
        })
        .collect()
}
