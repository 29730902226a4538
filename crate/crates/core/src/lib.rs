//! Weighted envy-freeness with subsidies.
//!
//! Agents with unequal entitlements (weights) share a set of indivisible
//! items. An outcome `(X, p)` of an allocation plus non-negative subsidies is
//! *weighted envy-free* (WEF) when for every pair of agents `i, j`
//!
//! ```text
//! (v_i(X_i) + p_i) / w_i  >=  (v_i(X_j) + p_j) / w_j
//! ```
//!
//! and an allocation is *WEF-able* when some subsidy vector makes it WEF.
//! This crate provides:
//!
//! * exact-rational domain types ([`model`]),
//! * the weighted envy-graph, WEF-ability decision procedures and the
//!   pointwise-minimal subsidy vector ([`envy`]),
//! * allocation procedures with worst-case subsidy guarantees for monotone,
//!   superadditive, additive, binary, identical-additive and identical-items
//!   valuations ([`allocators`]),
//! * budget-constrained fair subsidy splits ([`mwef`]),
//! * exhaustive ground-truth engines that certify everything above on small
//!   instances ([`oracle`]),
//! * seeded random instance generation and benchmark tables ([`generate`],
//!   [`experiments`]) and a JSON interchange format ([`io`]).
//!
//! All arithmetic is exact: every quantity is a [`Rational`] backed by
//! arbitrary-precision integers, so equality checks in tests are exact and
//! there is no floating-point path anywhere in the algorithms.

// index loops over dense square matrices stay as plain ranges: the index
// usually addresses several parallel arrays at once
#![allow(clippy::needless_range_loop)]

pub mod allocators;
pub mod envy;
pub mod error;
pub mod experiments;
pub mod flow;
pub mod generate;
pub mod io;
pub mod model;
pub mod mwef;
pub mod oracle;
pub mod rational;

pub use error::Error;
pub use model::{Allocation, Instance, Outcome, SubsidyVector, ValuationProfile, Weights};
pub use rational::Rational;

/// Crate-wide result type.
pub type Result<T> = std::result::Result<T, Error>;
