//! Identical items: the sequential protocol and the exact dynamic program.
//!
//! Only the item counts matter here, so allocations are count vectors. The
//! sequential protocol works on agents sorted by descending per-item value
//! (stable; results map back to original indices) and guarantees a subsidy
//! of at most `V w_i sum_{j<=i} 1/w_j` per sorted position `i`. The dynamic
//! program finds the exact minimum-total-subsidy counts when the per-item
//! values are pairwise distinct; it processes agents in ascending value
//! order, the opposite convention, and performs the permutation internally.

use num_traits::Zero;

use super::{density_or_zero, finish_report, AllocatorReport, TraceEvent};
use crate::error::Error;
use crate::model::{Allocation, Instance, ValuationProfile};
use crate::rational::{rat_int, Rational};
use crate::Result;

fn identical_values<'a>(instance: &'a Instance, algorithm: &'static str) -> Result<&'a [Rational]> {
    match instance.valuations() {
        ValuationProfile::IdenticalItems { per_agent, .. } => Ok(per_agent),
        _ => Err(Error::IncompatibleProfile { algorithm, expected: "an identical_items profile" }),
    }
}

pub fn allocate_identical_items(instance: &Instance) -> Result<AllocatorReport> {
    let values = identical_values(instance, "alg4")?;
    let n = instance.n();
    let m = instance.m();
    let w = instance.weights();

    // stable sort by descending value; sorted[pos] = original agent index
    let mut sorted: Vec<usize> = (0..n).collect();
    sorted.sort_by(|&a, &b| values[b].cmp(&values[a]));
    let sw: Vec<&Rational> = sorted.iter().map(|&a| w.get(a)).collect();

    let mut counts = vec![0usize; n];
    let mut trace = vec![TraceEvent::Order { sorted_to_original: sorted.clone() }];
    for item in 0..m {
        // positions >= 1 whose ratio stays below their predecessor's after
        // the update; position 0 (highest value) is always eligible
        let pick = (1..n)
            .rev()
            .find(|&pos| {
                rat_int(1 + counts[pos] as i64) / sw[pos] <= rat_int(counts[pos - 1] as i64) / sw[pos - 1]
            })
            .unwrap_or(0);
        counts[pick] += 1;
        trace.push(TraceEvent::Assign { item, agent: sorted[pick] });
    }

    let mut original_counts = vec![0usize; n];
    for (pos, &agent) in sorted.iter().enumerate() {
        original_counts[agent] = counts[pos];
    }

    let v = density_or_zero(instance);
    let mut bound = Rational::zero();
    let mut inv_prefix = Rational::zero();
    for pos in 0..n {
        inv_prefix += rat_int(1) / sw[pos];
        if pos >= 1 {
            bound += sw[pos] * &inv_prefix;
        }
    }
    bound *= &v;

    let allocation = Allocation::from_counts(&original_counts);
    finish_report(instance, allocation, bound, trace)
}

/// Result of the exact identical-items program.
#[derive(Debug, Clone)]
pub struct DpOutcome {
    /// Items per agent, original indexing.
    pub counts: Vec<usize>,
    /// Minimum total subsidy over all WEF-able count vectors.
    pub total: Rational,
    pub trace: Vec<TraceEvent>,
}

/// Minimum-total-subsidy counts via the `T(i, j, m_i)` recursion.
///
/// Requires pairwise distinct per-item values. Agents are processed in
/// ascending value order; a count vector is WEF-able exactly when the
/// per-weight counts are monotone along that order, and then the total
/// subsidy telescopes over adjacent envy edges, which is what the recursion
/// accumulates.
pub fn optimal_identical_items(instance: &Instance) -> Result<DpOutcome> {
    let values = identical_values(instance, "dp")?;
    let n = instance.n();
    let m = instance.m();
    let w = instance.weights();

    let mut sorted: Vec<usize> = (0..n).collect();
    sorted.sort_by(|&a, &b| values[a].cmp(&values[b]));
    for pair in sorted.windows(2) {
        if values[pair[0]] == values[pair[1]] {
            let (a, b) = (pair[0].min(pair[1]), pair[0].max(pair[1]));
            return Err(Error::DuplicateValues(a, b));
        }
    }
    let av: Vec<&Rational> = sorted.iter().map(|&a| &values[a]).collect();
    let aw: Vec<&Rational> = sorted.iter().map(|&a| w.get(a)).collect();
    let mut prefix_w = Vec::with_capacity(n);
    let mut acc = Rational::zero();
    for weight in &aw {
        acc += *weight;
        prefix_w.push(acc.clone());
    }

    // table[i][j][m_i]: minimum total subsidy with agents 0..=i, j items, of
    // which agent i holds m_i; None marks infeasible states
    let mut table: Vec<Vec<Vec<Option<Rational>>>> = vec![vec![vec![None; m + 1]; m + 1]; n];
    let mut choice: Vec<Vec<Vec<usize>>> = vec![vec![vec![usize::MAX; m + 1]; m + 1]; n];
    for j in 0..=m {
        table[0][j][j] = Some(Rational::zero());
    }
    for i in 1..n {
        for j in 0..=m {
            for mi in 0..=j {
                // feasibility window: m_i / w_i >= j / prefix_w
                if rat_int(mi as i64) * &prefix_w[i] < rat_int(j as i64) * aw[i] {
                    continue;
                }
                let mut best: Option<(Rational, usize)> = None;
                for prev in 0..=(j - mi) {
                    // adjacent WEF-ability: m_{i-1} / w_{i-1} <= m_i / w_i
                    if rat_int(prev as i64) * aw[i] > aw[i - 1] * rat_int(mi as i64) {
                        continue;
                    }
                    let Some(sub) = &table[i - 1][j - mi][prev] else { continue };
                    let edge = (rat_int(mi as i64) / aw[i] - rat_int(prev as i64) / aw[i - 1]) * av[i - 1];
                    let total = sub + &prefix_w[i - 1] * edge;
                    if best.as_ref().is_none_or(|(b, _)| total < *b) {
                        best = Some((total, prev));
                    }
                }
                if let Some((total, prev)) = best {
                    table[i][j][mi] = Some(total);
                    choice[i][j][mi] = prev;
                }
            }
        }
    }

    let (mut last, total) = (0..=m)
        .filter_map(|mi| table[n - 1][m][mi].clone().map(|t| (mi, t)))
        .min_by(|(_, a), (_, b)| a.cmp(b))
        .expect("giving everything to the top-value agent is always feasible");

    let mut sorted_counts = vec![0usize; n];
    let mut items_left = m;
    for i in (0..n).rev() {
        sorted_counts[i] = last;
        if i > 0 {
            let prev = choice[i][items_left][last];
            items_left -= last;
            last = prev;
        }
    }

    let mut counts = vec![0usize; n];
    for (pos, &agent) in sorted.iter().enumerate() {
        counts[agent] = sorted_counts[pos];
    }
    let trace = vec![TraceEvent::Order { sorted_to_original: sorted }];
    Ok(DpOutcome { counts, total, trace })
}
