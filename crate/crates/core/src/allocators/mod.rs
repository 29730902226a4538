//! Allocation procedures with worst-case subsidy guarantees.
//!
//! Every allocator returns an [`AllocatorReport`]: the allocation, its
//! pointwise-minimal subsidy vector, the exact total, the algorithm's
//! theoretical bound on that total, and a per-round trace. The produced
//! allocations are always WEF-able, so the subsidy computation cannot fail.

mod adjusted_winner;
mod additive;
mod binary;
mod general;
mod identical_additive;
mod identical_items;

pub use adjusted_winner::adjusted_winner;
pub use additive::allocate_additive;
pub use binary::allocate_binary;
pub use general::{allocate_all_to_best, msw_allocation, msw_bruteforce, vcg_outcome, MswOutcome, VcgOutcome};
pub use identical_additive::allocate_identical_additive;
pub use identical_items::{allocate_identical_items, optimal_identical_items, DpOutcome};

use serde::Serialize;

use crate::envy::min_subsidy_vector;
use crate::error::Error;
use crate::model::{Allocation, Instance, SubsidyVector};
use crate::rational::Rational;
use crate::Result;

/// Output of an allocation procedure.
#[derive(Debug, Clone)]
pub struct AllocatorReport {
    pub allocation: Allocation,
    /// `p*` for the produced allocation.
    pub subsidies: SubsidyVector,
    pub total_subsidy: Rational,
    /// Worst-case guarantee of the algorithm that produced the allocation.
    pub theoretical_bound: Rational,
    pub trace: Vec<TraceEvent>,
}

/// One step of an allocator run, serializable for `solve --trace`.
#[derive(Debug, Clone, Serialize)]
#[serde(tag = "event", rename_all = "snake_case")]
pub enum TraceEvent {
    /// One matching round: which items each agent received.
    Round { round: usize, assigned: Vec<(usize, Vec<usize>)> },
    /// A single item handed to an agent.
    Assign { item: usize, agent: usize },
    /// Agents dropped because no transfer path reaches the unallocated pool.
    Removed { agents: Vec<usize> },
    /// A transfer path: `path` lists agents from initiator to the agent that
    /// takes an unallocated item; `items[k]` moves from the `k+1`-th node of
    /// the path (the pool for the last hop) to the `k`-th.
    Transfer { path: Vec<usize>, items: Vec<usize> },
    /// Agent permutation used internally (sorted position -> original index).
    Order { sorted_to_original: Vec<usize> },
    /// The pivot item of the two-agent adjusted winner and its receiver.
    Contested { item: usize, agent: usize },
}

/// Builds a report around a finished allocation; the caller guarantees the
/// allocation is WEF-able (all allocators here do by construction).
pub(crate) fn finish_report(
    instance: &Instance,
    allocation: Allocation,
    theoretical_bound: Rational,
    trace: Vec<TraceEvent>,
) -> Result<AllocatorReport> {
    let subsidies = min_subsidy_vector(instance, &allocation)?;
    let total_subsidy = subsidies.total();
    Ok(AllocatorReport { allocation, subsidies, total_subsidy, theoretical_bound, trace })
}

/// `V` extended to the empty market.
pub(crate) fn density_or_zero(instance: &Instance) -> Rational {
    if instance.m() == 0 {
        Rational::from_integer(0.into())
    } else {
        instance.max_value_density().expect("m > 0")
    }
}

/// Algorithm selector for the CLI `solve` command.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum AlgorithmKind {
    /// All items to the agent with the highest value for the grand bundle.
    General,
    /// Iterated one-to-many matching for additive valuations (integer weights).
    Alg1,
    /// Sequential min-ratio picking for identical additive valuations.
    Alg2,
    /// Transfer-path protocol for binary additive valuations.
    Alg3,
    /// Sequential protocol for identical items.
    Alg4,
    /// Exact dynamic program for identical items with distinct values.
    Dp,
    /// Two-agent biased adjusted winner.
    Aw2,
    /// VCG with up-front subsidy for superadditive valuations.
    Vcg,
}

impl std::str::FromStr for AlgorithmKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Ok(match s {
            "general" => Self::General,
            "alg1" => Self::Alg1,
            "alg2" => Self::Alg2,
            "alg3" => Self::Alg3,
            "alg4" => Self::Alg4,
            "dp" => Self::Dp,
            "aw2" => Self::Aw2,
            "vcg" => Self::Vcg,
            other => return Err(Error::Parse(format!("unknown algorithm {other:?}"))),
        })
    }
}

impl std::fmt::Display for AlgorithmKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let name = match self {
            Self::General => "general",
            Self::Alg1 => "alg1",
            Self::Alg2 => "alg2",
            Self::Alg3 => "alg3",
            Self::Alg4 => "alg4",
            Self::Dp => "dp",
            Self::Aw2 => "aw2",
            Self::Vcg => "vcg",
        };
        f.write_str(name)
    }
}

/// Result of dispatching an algorithm: most produce a report, VCG also
/// carries its payments.
#[derive(Debug, Clone)]
pub enum SolveResult {
    Report(AllocatorReport),
    Vcg(VcgOutcome),
}

/// Dispatch an algorithm over an instance, validating profile compatibility.
pub fn run_algorithm(instance: &Instance, kind: AlgorithmKind) -> Result<SolveResult> {
    let report = match kind {
        AlgorithmKind::General => allocate_all_to_best(instance)?,
        AlgorithmKind::Alg1 => allocate_additive(instance)?,
        AlgorithmKind::Alg2 => allocate_identical_additive(instance)?,
        AlgorithmKind::Alg3 => allocate_binary(instance)?,
        AlgorithmKind::Alg4 => allocate_identical_items(instance)?,
        AlgorithmKind::Dp => {
            let base = allocate_identical_items(instance)?;
            let dp = optimal_identical_items(instance)?;
            let allocation = Allocation::from_counts(&dp.counts);
            let mut report = finish_report(instance, allocation, base.theoretical_bound, dp.trace.clone())?;
            debug_assert_eq!(report.total_subsidy, dp.total);
            report.trace = dp.trace;
            return Ok(SolveResult::Report(report));
        }
        AlgorithmKind::Aw2 => adjusted_winner(instance)?,
        AlgorithmKind::Vcg => return Ok(SolveResult::Vcg(vcg_outcome(instance)?)),
    };
    Ok(SolveResult::Report(report))
}
