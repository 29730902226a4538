//! Two-agent biased adjusted winner.
//!
//! Values are normalized so each agent's total is 1, items are sorted by the
//! ratio of agent 1's to agent 2's normalized value (descending), and the
//! unique contested item at the proportionality threshold goes to whichever
//! agent values it more (ties to agent 1). The outcome is both WEF(1,1) and
//! WEF-able. Degenerate ratios: items only agent 1 values sort first
//! (infinite ratio); items neither values are appended at the end, where
//! they change nothing.

use num_traits::Zero;

use super::{density_or_zero, finish_report, AllocatorReport, TraceEvent};
use crate::error::Error;
use crate::model::{Allocation, Instance};
use crate::rational::{rat_int, Rational};
use crate::Result;

pub fn adjusted_winner(instance: &Instance) -> Result<AllocatorReport> {
    if !instance.valuations().is_additive_class() {
        return Err(Error::IncompatibleProfile {
            algorithm: "aw2",
            expected: "an additive-class profile",
        });
    }
    if instance.n() != 2 {
        return Err(Error::IncompatibleProfile {
            algorithm: "aw2",
            expected: "exactly two agents",
        });
    }
    let m = instance.m();
    let raw: Vec<Vec<Rational>> = (0..2)
        .map(|i| (0..m).map(|o| instance.valuations().item_value(i, o)).collect())
        .collect();
    let totals: Vec<Rational> = raw.iter().map(|row| row.iter().sum()).collect();
    for (agent, total) in totals.iter().enumerate() {
        if total.is_zero() {
            return Err(Error::ZeroTotalValue(agent));
        }
    }
    let unit: Vec<Vec<Rational>> = (0..2)
        .map(|i| raw[i].iter().map(|v| v / &totals[i]).collect())
        .collect();

    // sort class: 0 = only agent 1 cares (ratio infinity), 1 = agent 2 cares
    // (finite ratio, descending), 2 = nobody cares
    let class = |o: usize| -> u8 {
        match (unit[0][o].is_zero(), unit[1][o].is_zero()) {
            (false, true) => 0,
            (_, false) => 1,
            (true, true) => 2,
        }
    };
    let mut order: Vec<usize> = (0..m).collect();
    order.sort_by(|&a, &b| {
        class(a).cmp(&class(b)).then_with(|| {
            if class(a) == 1 && class(b) == 1 {
                // u1(a)/u2(a) >= u1(b)/u2(b), cross-multiplied
                let lhs = &unit[0][a] * &unit[1][b];
                let rhs = &unit[0][b] * &unit[1][a];
                rhs.cmp(&lhs)
            } else {
                std::cmp::Ordering::Equal
            }
        })
    });

    // contested index: first d with sum_{r<=d} u1 / w1 >= sum_{r>d} u1 / w2
    let (w1, w2) = (instance.weights().get(0), instance.weights().get(1));
    let mut contested = m; // 1-based position of the contested item
    let mut left_sum = Rational::zero();
    for (pos, &item) in order.iter().enumerate() {
        let below = &left_sum / w1 - (rat_int(1) - &left_sum) / w2;
        debug_assert!(below < Rational::zero(), "crossing must not happen before the pivot");
        left_sum += &unit[0][item];
        let at = &left_sum / w1 - (rat_int(1) - &left_sum) / w2;
        if at >= Rational::zero() {
            contested = pos + 1;
            break;
        }
    }
    let pivot = order[contested - 1];
    let pivot_holder = if raw[0][pivot] >= raw[1][pivot] { 0 } else { 1 };

    let mut owner = vec![usize::MAX; m];
    for (pos, &item) in order.iter().enumerate() {
        owner[item] = match (pos + 1).cmp(&contested) {
            std::cmp::Ordering::Less => 0,
            std::cmp::Ordering::Equal => pivot_holder,
            std::cmp::Ordering::Greater => 1,
        };
    }

    let trace = vec![
        TraceEvent::Order { sorted_to_original: order },
        TraceEvent::Contested { item: pivot, agent: pivot_holder },
    ];
    let allocation = Allocation::from_owners(owner, 2)?;
    // WEF-able and WEF(1,1) allocations need at most (1+1)(W/w_min - 1)(n-1)V
    let w = instance.weights();
    let bound = rat_int(2) * (w.total() / w.min() - rat_int(1)) * density_or_zero(instance);
    finish_report(instance, allocation, bound, trace)
}
