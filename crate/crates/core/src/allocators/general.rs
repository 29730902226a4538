//! Procedures for general monotone and superadditive valuations: the
//! all-to-one fallback, brute-force welfare maximization, and VCG with an
//! up-front subsidy.

use num_traits::Zero;

use super::{density_or_zero, finish_report, AllocatorReport, TraceEvent};
use crate::error::Error;
use crate::model::{Allocation, Instance, SubsidyVector, ValuationProfile};
use crate::rational::{rat_int, Rational};
use crate::Result;

/// Items a welfare search may enumerate: `|agents|^|items|` assignments.
const MSW_MAX_ITEMS: usize = 12;

/// All items to an agent maximizing `v_i(M)` (lowest index on ties).
///
/// Works for every monotone profile and is WEF-able because the receiver
/// values the grand bundle at least as much as anyone else does; total
/// subsidy is at most `(W/w_min - 1) * m * V`.
pub fn allocate_all_to_best(instance: &Instance) -> Result<AllocatorReport> {
    let n = instance.n();
    let m = instance.m();
    let everything: Vec<usize> = (0..m).collect();
    let best = (0..n)
        .map(|i| instance.value(i, &everything))
        .enumerate()
        .max_by(|(ia, va), (ib, vb)| va.cmp(vb).then(ib.cmp(ia)))
        .map(|(i, _)| i)
        .expect("n >= 1");
    let allocation = Allocation::from_owners(vec![best; m], n)?;

    let v = density_or_zero(instance);
    let w = instance.weights();
    let ratio = w.total() / w.min() - rat_int(1);
    let bound = ratio * rat_int(m as i64) * v;
    let trace = vec![TraceEvent::Round { round: 1, assigned: vec![(best, everything)] }];
    finish_report(instance, allocation, bound, trace)
}

/// Welfare-maximizing assignment of `items` among `agents`.
#[derive(Debug, Clone)]
pub struct MswOutcome {
    /// `owners[k]` holds item `items[k]` (an index into the instance's agents).
    pub owners: Vec<usize>,
    pub welfare: Rational,
}

/// Exhaustive maximum social welfare over assignments of the given item
/// subset among the given agent subset. Ties keep the lexicographically
/// first owner vector (agents scanned in the order provided).
pub fn msw_bruteforce(instance: &Instance, agents: &[usize], items: &[usize]) -> Result<MswOutcome> {
    if items.len() > MSW_MAX_ITEMS {
        return Err(Error::TooLarge(format!(
            "welfare search capped at {MSW_MAX_ITEMS} items, got {}",
            items.len()
        )));
    }
    assert!(!agents.is_empty(), "need at least one agent");

    let mut choice = vec![0usize; items.len()];
    let mut best: Option<(Rational, Vec<usize>)> = None;
    loop {
        let mut bundles: Vec<Vec<usize>> = vec![Vec::new(); agents.len()];
        for (slot, &pick) in choice.iter().enumerate() {
            bundles[pick].push(items[slot]);
        }
        let welfare: Rational = agents
            .iter()
            .enumerate()
            .map(|(k, &agent)| instance.value(agent, &bundles[k]))
            .sum();
        if best.as_ref().is_none_or(|(b, _)| welfare > *b) {
            best = Some((welfare, choice.iter().map(|&k| agents[k]).collect()));
        }
        // lexicographic odometer
        let mut advanced = false;
        for slot in choice.iter_mut().rev() {
            *slot += 1;
            if *slot < agents.len() {
                advanced = true;
                break;
            }
            *slot = 0;
        }
        if !advanced {
            break;
        }
    }
    let (welfare, owners) = best.expect("at least one assignment");
    Ok(MswOutcome { owners, welfare })
}

/// Maximum-social-welfare allocation of all items among all agents.
pub fn msw_allocation(instance: &Instance) -> Result<Allocation> {
    let agents: Vec<usize> = (0..instance.n()).collect();
    let items: Vec<usize> = (0..instance.m()).collect();
    let outcome = msw_bruteforce(instance, &agents, &items)?;
    Allocation::from_owners(outcome.owners, instance.n())
}

/// VCG with an up-front subsidy of `C * w_i` per agent, `C = m V / w_min`.
#[derive(Debug, Clone)]
pub struct VcgOutcome {
    pub allocation: Allocation,
    /// Externality payments `q_i = SW_{N\{i}}(X') - SW_{N\{i}}(X)`.
    pub payments: Vec<Rational>,
    /// The per-weight-unit up-front transfer `C`.
    pub upfront_rate: Rational,
    /// Net subsidies `C * w_i - q_i`; all non-negative.
    pub subsidies: SubsidyVector,
}

/// Runs the VCG mechanism and folds the payments into the up-front subsidy.
/// The outcome allocation maximizes social welfare and the final outcome is
/// WEF; requires superadditive valuations.
pub fn vcg_outcome(instance: &Instance) -> Result<VcgOutcome> {
    ensure_superadditive(instance)?;
    let n = instance.n();
    let m = instance.m();
    let all_agents: Vec<usize> = (0..n).collect();
    let all_items: Vec<usize> = (0..m).collect();

    let msw = msw_bruteforce(instance, &all_agents, &all_items)?;
    let allocation = Allocation::from_owners(msw.owners.clone(), n)?;
    let bundles = allocation.bundles();

    let mut payments = Vec::with_capacity(n);
    for i in 0..n {
        if n == 1 {
            payments.push(Rational::zero());
            continue;
        }
        let others: Vec<usize> = (0..n).filter(|&j| j != i).collect();
        let without_i = msw_bruteforce(instance, &others, &all_items)?;
        let current: Rational = others.iter().map(|&j| instance.value(j, &bundles[j])).sum();
        payments.push(without_i.welfare - current);
    }

    let v = density_or_zero(instance);
    let upfront_rate = rat_int(m as i64) * v / instance.weights().min();
    let amounts: Vec<Rational> = (0..n)
        .map(|i| &upfront_rate * instance.weights().get(i) - &payments[i])
        .collect();
    let subsidies = SubsidyVector::new(amounts)?;
    Ok(VcgOutcome { allocation, payments, upfront_rate, subsidies })
}

/// Additive-class profiles are superadditive by construction; capped and
/// table profiles are checked by brute force over disjoint bundle pairs.
fn ensure_superadditive(instance: &Instance) -> Result<()> {
    match instance.valuations() {
        p if p.is_additive_class() => Ok(()),
        ValuationProfile::Capped { caps, m } => {
            let capped_value = |cap: &Rational, size: usize| {
                let size = rat_int(size as i64);
                if cap < &size {
                    cap.clone()
                } else {
                    size
                }
            };
            for a in 0..=*m {
                for b in 0..=(m - a) {
                    for (agent, cap) in caps.iter().enumerate() {
                        if capped_value(cap, a) + capped_value(cap, b) > capped_value(cap, a + b) {
                            return Err(Error::NotSuperadditive(format!(
                                "agent {agent}: bundles of sizes {a} and {b} violate superadditivity"
                            )));
                        }
                    }
                }
            }
            Ok(())
        }
        ValuationProfile::Table { bundles, m } => {
            let size = 1usize << m;
            for (agent, row) in bundles.iter().enumerate() {
                for mask_a in 0..size {
                    // enumerate subsets of the complement for disjointness
                    let complement = (size - 1) & !mask_a;
                    let mut mask_b = complement;
                    loop {
                        if &row[mask_a] + &row[mask_b] > row[mask_a | mask_b] {
                            return Err(Error::NotSuperadditive(format!(
                                "agent {agent}: bundles {mask_a:#b} and {mask_b:#b}"
                            )));
                        }
                        if mask_b == 0 {
                            break;
                        }
                        mask_b = (mask_b - 1) & complement;
                    }
                }
            }
            Ok(())
        }
        other => Err(Error::NotSuperadditive(format!("cannot verify {} profiles", other.variant_name()))),
    }
}
