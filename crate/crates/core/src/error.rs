use thiserror::Error;

/// Errors shared across the crate.
#[derive(Debug, Error)]
pub enum Error {
    /// Matrix or vector dimensions disagree with the declared agent/item counts.
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    /// A construction-time invariant of a valuation profile failed.
    #[error("invalid valuation profile: {0}")]
    InvalidProfile(String),

    /// Weights must be strictly positive.
    #[error("invalid weights: {0}")]
    InvalidWeights(String),

    /// The operation only supports some valuation classes.
    #[error("unsupported profile: expected {expected}, got {got}")]
    UnsupportedProfile { expected: &'static str, got: &'static str },

    /// An algorithm was asked to run on a profile variant it does not handle.
    #[error("incompatible profile for {algorithm}: expected {expected}")]
    IncompatibleProfile { algorithm: &'static str, expected: &'static str },

    /// The allocation admits no subsidy vector making it WEF.
    #[error("allocation is not WEF-able: positive-cost cycle {cycle:?}")]
    NotWefable { cycle: Vec<usize> },

    /// An enumeration guard tripped.
    #[error("instance too large for exhaustive search: {0}")]
    TooLarge(String),

    /// Valuations are not superadditive, so the VCG route does not apply.
    #[error("valuations are not superadditive: {0}")]
    NotSuperadditive(String),

    /// The identical-items dynamic program needs pairwise distinct values.
    #[error("per-item values must be pairwise distinct (agents {0} and {1} coincide)")]
    DuplicateValues(usize, usize),

    /// Adjusted winner needs both agents to value the full item set positively.
    #[error("agent {0} values the whole item set at zero")]
    ZeroTotalValue(usize),

    /// Budgets must be non-negative.
    #[error("budget must be non-negative, got {0}")]
    NegativeBudget(String),

    /// A rational literal could not be parsed.
    #[error("invalid rational literal {literal:?}: {reason}")]
    BadRational { literal: String, reason: String },

    /// JSON input did not match the instance/allocation schema.
    #[error("parse error: {0}")]
    Parse(String),

    /// Empty instance where at least one item is required.
    #[error("operation requires at least one item")]
    NoItems,
}
