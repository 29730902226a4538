//! Benchmark tables over seeded random instances.
//!
//! Reproduces the experiment design: weight vector `(1, ..., n)`, a value
//! distribution, several item counts, and per-cell means over a fixed number
//! of trials. The algorithm and exact-minimum columns are distributional;
//! the bound column is deterministic. Per-trial seeds are derived by
//! counter-based stream splitting so parallel and serial runs agree.

use num_traits::Zero;

use crate::allocators::{run_algorithm, AlgorithmKind, SolveResult};
use crate::error::Error;
use crate::generate::{generate_instance, trial_rng, ValuationDistribution, WeightRule};
use crate::model::Weights;
use crate::oracle::{min_total_subsidy_exhaustive, ENUMERATION_GUARD};
use crate::rational::{decimal_string, rat_int, Rational};
use crate::Result;

#[derive(Debug, Clone)]
pub struct ExperimentConfig {
    pub n: usize,
    pub m_values: Vec<usize>,
    pub weights: WeightRule,
    pub distribution: ValuationDistribution,
    pub algorithm: AlgorithmKind,
    pub trials: usize,
    pub seed: u64,
    /// Also compute the exact minimum per trial (subject to the oracle guard).
    pub exact: bool,
}

/// One row of the benchmark table (one item count).
#[derive(Debug, Clone)]
pub struct BenchRow {
    pub m: usize,
    /// Mean total subsidy of the configured algorithm, exact rational.
    pub algorithm_mean: Rational,
    /// Mean exact minimum; `None` when not requested or beyond the guard.
    pub exact_mean: Option<Rational>,
    /// Distribution-level theoretical bound for the algorithm.
    pub bound: Rational,
}

/// The deterministic bound column: the algorithm's guarantee evaluated at
/// the distribution's maximum value.
pub fn distribution_bound(
    algorithm: AlgorithmKind,
    weights: &Weights,
    m: usize,
    distribution: &ValuationDistribution,
) -> Rational {
    let v = distribution.max_value();
    let total = weights.total();
    let wmin = weights.min();
    match algorithm {
        AlgorithmKind::General => (&total / &wmin - rat_int(1)) * rat_int(m as i64) * v,
        AlgorithmKind::Alg1 => {
            let norm = weights.gcd_normalized();
            (norm.total() - norm.min()) * v
        }
        AlgorithmKind::Alg2 => rat_int(weights.len() as i64 - 1) * v,
        AlgorithmKind::Alg3 => &total / &wmin - rat_int(1),
        AlgorithmKind::Alg4 | AlgorithmKind::Dp => {
            // sum over i >= 2 of w_i * sum_{j <= i} 1/w_j, weights as given
            let mut bound = Rational::zero();
            let mut inv_prefix = Rational::zero();
            for (i, w) in weights.as_slice().iter().enumerate() {
                inv_prefix += rat_int(1) / w;
                if i >= 1 {
                    bound += w * &inv_prefix;
                }
            }
            bound * v
        }
        AlgorithmKind::Aw2 => rat_int(2) * (&total / &wmin - rat_int(1)) * v,
        AlgorithmKind::Vcg => (&total / &wmin - rat_int(1)) * rat_int(m as i64) * v,
    }
}

/// Run the configured experiment and return one row per item count.
///
/// Invariant, checked per trial: exact minimum (when computed) <= algorithm
/// total <= the per-instance guarantee reported by the algorithm.
pub fn run_bench(config: &ExperimentConfig) -> Result<Vec<BenchRow>> {
    if config.trials == 0 {
        return Err(Error::Parse("trials must be >= 1".into()));
    }
    let weights = config.weights.weights(config.n)?;
    let mut rows = Vec::with_capacity(config.m_values.len());
    for (m_index, &m) in config.m_values.iter().enumerate() {
        let mut algorithm_sum = Rational::zero();
        let mut exact_sum = Some(Rational::zero());
        let within_guard = (config.n as u128)
            .checked_pow(m as u32)
            .is_some_and(|c| c <= ENUMERATION_GUARD);
        if !config.exact || !within_guard {
            exact_sum = None;
        }
        for trial in 0..config.trials {
            let stream = (m_index * config.trials + trial) as u64;
            let mut rng = trial_rng(config.seed, stream);
            let instance = generate_instance(config.n, m, &config.weights, &config.distribution, &mut rng)?;
            let report = match run_algorithm(&instance, config.algorithm)? {
                SolveResult::Report(report) => report,
                SolveResult::Vcg(_) => {
                    return Err(Error::Parse("vcg does not produce a benchmark total".into()))
                }
            };
            assert!(
                report.total_subsidy <= report.theoretical_bound,
                "algorithm exceeded its own guarantee"
            );
            if let Some(sum) = &mut exact_sum {
                let oracle = min_total_subsidy_exhaustive(&instance)?;
                assert!(
                    oracle.total <= report.total_subsidy,
                    "oracle minimum above the algorithm total"
                );
                *sum += oracle.total;
            }
            algorithm_sum += report.total_subsidy;
        }
        let trials = rat_int(config.trials as i64);
        rows.push(BenchRow {
            m,
            algorithm_mean: algorithm_sum / &trials,
            exact_mean: exact_sum.map(|s| s / &trials),
            bound: distribution_bound(config.algorithm, &weights, m, &config.distribution),
        });
    }
    Ok(rows)
}

/// CSV rendering; fixed seed implies byte-identical output.
pub fn rows_to_csv(rows: &[BenchRow]) -> String {
    let mut out = String::from("m,algorithm_mean,exact_min_mean,bound\n");
    for row in rows {
        let exact = row
            .exact_mean
            .as_ref()
            .map(|r| decimal_string(r, 12))
            .unwrap_or_default();
        out.push_str(&format!(
            "{},{},{},{}\n",
            row.m,
            decimal_string(&row.algorithm_mean, 12),
            exact,
            decimal_string(&row.bound, 12)
        ));
    }
    out
}

/// Aligned text rendering.
pub fn rows_to_text(rows: &[BenchRow]) -> String {
    let mut table = vec![[
        "m".to_string(),
        "algorithm".to_string(),
        "exact min".to_string(),
        "bound".to_string(),
    ]];
    for row in rows {
        table.push([
            row.m.to_string(),
            decimal_string(&row.algorithm_mean, 6),
            row.exact_mean.as_ref().map(|r| decimal_string(r, 6)).unwrap_or_else(|| "-".into()),
            decimal_string(&row.bound, 6),
        ]);
    }
    let widths: Vec<usize> = (0..4)
        .map(|c| table.iter().map(|r| r[c].len()).max().unwrap_or(0))
        .collect();
    let mut out = String::new();
    for row in &table {
        let line: Vec<String> = row
            .iter()
            .zip(&widths)
            .map(|(cell, w)| format!("{cell:>w$}"))
            .collect();
        out.push_str(&line.join("  "));
        out.push('\n');
    }
    out
}
