//! Iterated one-to-many matching for additive-class valuations.
//!
//! Weights are replaced by their gcd-normalized integer form `w'` (the WEF
//! condition and the minimal subsidy vector are invariant under scaling the
//! weight vector). Each round matches the remaining items so that agent `i`
//! receives exactly `w'_i` of them, padding with zero-value dummies when
//! fewer than `W'` items remain; the matching maximizes total value via a
//! min-cost flow on the 4-layer network. Total subsidy is at most
//! `(W' - w'_min) V` and each agent needs at most `w'_i V`.

use num_traits::Zero;

use super::{density_or_zero, finish_report, AllocatorReport, TraceEvent};
use crate::error::Error;
use crate::flow::FlowNetwork;
use crate::model::{Allocation, Instance};
use crate::rational::{rat_int, to_i64, Rational};
use crate::Result;

/// Cap on the normalized weight total; one round matches this many items.
const MAX_NORMALIZED_WEIGHT: i64 = 100_000;

pub fn allocate_additive(instance: &Instance) -> Result<AllocatorReport> {
    if !instance.valuations().is_additive_class() {
        return Err(Error::IncompatibleProfile {
            algorithm: "alg1",
            expected: "an additive-class profile",
        });
    }
    let n = instance.n();
    let m = instance.m();

    let norm = instance.weights().gcd_normalized();
    let quotas: Vec<i64> = norm
        .as_slice()
        .iter()
        .map(to_i64)
        .collect::<Option<_>>()
        .ok_or_else(|| Error::TooLarge("normalized weights exceed machine range".into()))?;
    let round_size: i64 = quotas.iter().sum();
    if round_size > MAX_NORMALIZED_WEIGHT {
        return Err(Error::TooLarge(format!(
            "normalized weights sum to {round_size}, above the {MAX_NORMALIZED_WEIGHT} cap"
        )));
    }
    let round_size = round_size as usize;

    let mut owner = vec![usize::MAX; m];
    let mut remaining: Vec<usize> = (0..m).collect();
    let mut trace = Vec::new();
    let mut round = 0usize;

    while !remaining.is_empty() {
        round += 1;
        let dummies = round_size.saturating_sub(remaining.len());
        let total_items = remaining.len() + dummies;

        // layers: source, agents, items (real then dummy), sink
        let nodes = 2 + n + total_items;
        let (source, sink) = (0, nodes - 1);
        let item_node = |k: usize| 1 + n + k;
        let mut net = FlowNetwork::new(nodes, source, sink);
        for (i, &q) in quotas.iter().enumerate() {
            net.add_arc(source, 1 + i, q as u64, Rational::zero());
        }
        // agent-major arc order keeps the solve deterministic
        for i in 0..n {
            for (k, &item) in remaining.iter().enumerate() {
                net.add_arc(1 + i, item_node(k), 1, -instance.valuations().item_value(i, item));
            }
            for k in remaining.len()..total_items {
                net.add_arc(1 + i, item_node(k), 1, Rational::zero());
            }
        }
        for k in 0..total_items {
            net.add_arc(item_node(k), sink, 1, Rational::zero());
        }

        let flow = net.min_cost_max_flow()?;
        debug_assert_eq!(flow.value as usize, round_size);

        let mut assigned: Vec<(usize, Vec<usize>)> = Vec::new();
        let mut taken = Vec::new();
        let mut arc = n; // agent->item arcs start after the n source arcs
        for i in 0..n {
            let mut got = Vec::new();
            for (k, &item) in remaining.iter().enumerate() {
                if flow.flows[arc + k] == 1 {
                    owner[item] = i;
                    got.push(item);
                    taken.push(item);
                }
            }
            arc += total_items;
            if !got.is_empty() {
                assigned.push((i, got));
            }
        }
        trace.push(TraceEvent::Round { round, assigned });
        remaining.retain(|item| !taken.contains(item));
        debug_assert!(taken.len() == round_size.min(m) || !taken.is_empty());
    }

    let allocation = Allocation::from_owners(owner, n)?;
    let v = density_or_zero(instance);
    let min_quota = *quotas.iter().min().expect("n >= 1");
    let bound = rat_int(round_size as i64 - min_quota) * v;
    finish_report(instance, allocation, bound, trace)
}
