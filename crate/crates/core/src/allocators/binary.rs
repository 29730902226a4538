//! Transfer-path protocol for binary additive valuations.
//!
//! All items start in the unallocated pool. Each iteration first drops every
//! remaining agent with no transfer path to the pool, then hands one more
//! liked item to the agent maximizing `w_i / (v_i(X_i) + 1)`, rotating items
//! along a shortest transfer path so every other agent's utility is
//! preserved. The output is non-redundant (everyone's bundle is fully
//! liked), hence welfare-maximizing and WEF-able; subsidy per agent is at
//! most `w_i / w_min` and the total at most
//! `max{(W - w_min)/w_2, (W - w_2)/w_min}`.
//!
//! Tie-breaking is pinned for reproducibility: gain-function ties go to the
//! larger weight, then the larger index; path search is breadth-first with
//! neighbors explored in ascending agent index (pool last); each hop moves
//! the lowest-index qualifying item.

use num_traits::Zero;

use super::{finish_report, AllocatorReport, TraceEvent};
use crate::error::Error;
use crate::model::{Allocation, Instance, ValuationProfile};
use crate::rational::{rat_int, Rational};
use crate::Result;

pub fn allocate_binary(instance: &Instance) -> Result<AllocatorReport> {
    let ValuationProfile::Binary { matrix } = instance.valuations() else {
        return Err(Error::IncompatibleProfile {
            algorithm: "alg3",
            expected: "a binary profile",
        });
    };
    let n = instance.n();
    let m = instance.m();
    let w = instance.weights();

    // owner[o] = agent index, or POOL
    const POOL: usize = usize::MAX;
    let mut owner = vec![POOL; m];
    let mut liked_count = vec![0usize; n]; // v_i(X_i); bundles stay non-redundant
    let mut in_game: Vec<bool> = vec![true; n];
    let mut trace = Vec::new();

    // breadth-first shortest transfer path from `start` to the pool; nodes
    // are agents 0..n plus the pool as node n
    let transfer_path = |owner: &[usize], start: usize| -> Option<Vec<usize>> {
        let pool_node = n;
        let mut parent = vec![usize::MAX; n + 1];
        let mut seen = vec![false; n + 1];
        let mut queue = std::collections::VecDeque::new();
        seen[start] = true;
        queue.push_back(start);
        while let Some(at) = queue.pop_front() {
            // neighbor j holds an item the agent `at` likes; pool explored last
            for next in (0..n).chain([pool_node]) {
                if seen[next] || next == at {
                    continue;
                }
                let reachable = (0..m).any(|o| {
                    matrix[at][o]
                        && if next == pool_node { owner[o] == POOL } else { owner[o] == next }
                });
                if !reachable {
                    continue;
                }
                seen[next] = true;
                parent[next] = at;
                if next == pool_node {
                    let mut path = vec![pool_node];
                    let mut cur = pool_node;
                    while cur != start {
                        cur = parent[cur];
                        path.push(cur);
                    }
                    path.reverse();
                    return Some(path);
                }
                queue.push_back(next);
            }
        }
        None
    };

    loop {
        // removal sweep at the top of every iteration
        let mut removed = Vec::new();
        for i in 0..n {
            if in_game[i] && transfer_path(&owner, i).is_none() {
                in_game[i] = false;
                removed.push(i);
            }
        }
        if !removed.is_empty() {
            trace.push(TraceEvent::Removed { agents: removed });
        }

        // gain function w_i / (v_i(X_i) + 1); ties to larger weight, then index
        let Some(chosen) = (0..n)
            .filter(|&i| in_game[i])
            .max_by(|&a, &b| {
                let ga = w.get(a) / rat_int(liked_count[a] as i64 + 1);
                let gb = w.get(b) / rat_int(liked_count[b] as i64 + 1);
                ga.cmp(&gb).then_with(|| w.get(a).cmp(w.get(b))).then(a.cmp(&b))
            })
        else {
            break;
        };

        let path = transfer_path(&owner, chosen).expect("sweep kept only agents with a path");
        // choose the moved items against the pre-transfer bundles: hop k
        // takes the lowest-index item of the next node that agent path[k] likes
        let mut moved = Vec::with_capacity(path.len() - 1);
        for k in 0..path.len() - 1 {
            let taker = path[k];
            let from = path[k + 1];
            let from_owner = if from == n { POOL } else { from };
            let item = (0..m)
                .find(|&o| matrix[taker][o] && owner[o] == from_owner)
                .expect("transfer edge implies a qualifying item");
            moved.push(item);
        }
        for (k, &item) in moved.iter().enumerate() {
            owner[item] = path[k];
        }
        liked_count[chosen] += 1;
        trace.push(TraceEvent::Transfer { path, items: moved });
    }

    // leftovers are liked by nobody; park them with agent 0 (they carry no
    // envy either way, the allocation must simply be complete)
    for o in 0..m {
        if owner[o] == POOL {
            owner[o] = 0;
            debug_assert!((0..n).all(|i| !matrix[i][o]));
        }
    }

    let allocation = Allocation::from_owners(owner, n)?;
    let bound = binary_bound(instance);
    finish_report(instance, allocation, bound, trace)
}

/// `max{(W - w_min)/w_2, (W - w_2)/w_min}` with `w_2` the second-smallest
/// weight; zero for a single agent.
fn binary_bound(instance: &Instance) -> Rational {
    let w = instance.weights();
    match w.second_smallest() {
        None => Rational::zero(),
        Some(w2) => {
            let total = w.total();
            let wmin = w.min();
            let a = (&total - &wmin) / &w2;
            let b = (&total - &w2) / &wmin;
            if a > b {
                a
            } else {
                b
            }
        }
    }
}
