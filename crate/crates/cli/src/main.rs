//! `wefsub`: weighted envy-free allocation with subsidies.
//!
//! Verbs: `check`, `solve`, `min-subsidy --exact`, `mwef --budget`,
//! `export-lp`, `gen`, `bench`. Instances and allocations travel as JSON
//! with rationals encoded as `"p/q"` strings.

mod lp;

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Parser, Subcommand, ValueEnum};
use serde_json::json;

use wefsub::allocators::{run_algorithm, AlgorithmKind, SolveResult};
use wefsub::envy::{check_wef_xy, check_wwef1, min_subsidy_vector, wefability, WefMethod, WefabilityCertificate};
use wefsub::experiments::{rows_to_csv, rows_to_text, run_bench, ExperimentConfig};
use wefsub::generate::{generate_instance, trial_rng, ValuationDistribution, WeightRule};
use wefsub::io;
use wefsub::model::{Allocation, Instance};
use wefsub::mwef::distribute_budget;
use wefsub::oracle::{min_total_subsidy_exhaustive, min_total_subsidy_non_wasteful};
use wefsub::rational::{decimal_string, format_rational, parse_rational, rat_int, Rational};

#[derive(Parser)]
#[command(name = "wefsub", version, about = "Weighted envy-free allocation with subsidies")]
struct Cli {
    #[command(subcommand)]
    command: Command,
    /// Output format
    #[arg(long, global = true, value_enum, default_value_t = Format::Text)]
    format: Format,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Csv,
    Text,
}

#[derive(Subcommand)]
enum Command {
    /// Check WEF-ability of an allocation; exit 0 iff it is WEF-able
    Check {
        instance: PathBuf,
        allocation: PathBuf,
    },
    /// Run an allocation algorithm and report allocation, subsidies and bound
    Solve {
        instance: PathBuf,
        /// One of: general, alg1, alg2, alg3, alg4, dp, aw2, vcg
        #[arg(long)]
        algorithm: String,
        /// Include the per-round trace in the report
        #[arg(long)]
        trace: bool,
    },
    /// Exact minimum total subsidy over all allocations (exhaustive search)
    MinSubsidy {
        instance: PathBuf,
        /// Acknowledge the exponential enumeration
        #[arg(long)]
        exact: bool,
        /// Restrict the search to non-wasteful allocations
        #[arg(long)]
        non_wasteful: bool,
    },
    /// Split a fixed budget so that only never-envied agents receive money
    Mwef {
        instance: PathBuf,
        allocation: PathBuf,
        /// Budget as a rational, e.g. 6/7
        #[arg(long)]
        budget: String,
    },
    /// Export the subsidy-minimization MILP in LP text format
    ExportLp {
        instance: PathBuf,
        /// Output file (stdout when omitted)
        #[arg(short, long)]
        out: Option<PathBuf>,
    },
    /// Generate seeded random instances
    Gen {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        m: usize,
        /// uniform:LO,HI | bernoulli:P | identical-uniform:LO,HI | per-agent-uniform:LO,HI
        #[arg(long, default_value = "uniform:5,6")]
        distribution: String,
        /// Comma-separated weights; defaults to 1,2,...,n
        #[arg(long)]
        weights: Option<String>,
        #[arg(long, env = "WEF_SEED", default_value_t = 0)]
        seed: u64,
        /// How many instances to generate
        #[arg(long, default_value_t = 1)]
        count: usize,
        /// Output file prefix (stdout when omitted and count is 1)
        #[arg(short, long)]
        out: Option<PathBuf>,
    },
    /// Mean subsidies of an algorithm over seeded random instances
    Bench {
        #[arg(long)]
        n: usize,
        /// Comma-separated item counts; defaults to n,2n,3n,4n,5n
        #[arg(long)]
        m_list: Option<String>,
        #[arg(long)]
        algorithm: String,
        #[arg(long, default_value = "uniform:5,6")]
        distribution: String,
        #[arg(long)]
        weights: Option<String>,
        #[arg(long, default_value_t = 50)]
        trials: usize,
        #[arg(long, env = "WEF_SEED", default_value_t = 0)]
        seed: u64,
        /// Also compute the exact minimum per trial (desk-scale only)
        #[arg(long)]
        exact: bool,
    },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(code) => code,
        Err(err) => {
            eprintln!("error: {err:#}");
            ExitCode::from(2)
        }
    }
}

fn read_instance(path: &Path) -> Result<Instance> {
    let text = std::fs::read_to_string(path)
        .with_context(|| format!("reading instance file {}", path.display()))?;
    io::parse_instance(&text).with_context(|| format!("parsing instance file {}", path.display()))
}

fn read_allocation(path: &Path, instance: &Instance) -> Result<Allocation> {
    let text = std::fs::read_to_string(path)
        .with_context(|| format!("reading allocation file {}", path.display()))?;
    io::parse_allocation(&text, instance)
        .with_context(|| format!("parsing allocation file {}", path.display()))
}

fn parse_weights(spec: &Option<String>) -> Result<WeightRule> {
    match spec {
        None => Ok(WeightRule::Ascending),
        Some(text) => {
            let values = text
                .split(',')
                .map(|s| parse_rational(s.trim()))
                .collect::<std::result::Result<Vec<_>, _>>()?;
            Ok(WeightRule::Explicit(values))
        }
    }
}

fn parse_distribution(spec: &str) -> Result<ValuationDistribution> {
    let (kind, args) = spec
        .split_once(':')
        .with_context(|| format!("distribution {spec:?} needs the form name:args"))?;
    let range = || -> Result<(i64, i64)> {
        let (lo, hi) = args
            .split_once(',')
            .with_context(|| format!("distribution {spec:?} needs LO,HI"))?;
        Ok((lo.trim().parse()?, hi.trim().parse()?))
    };
    match kind {
        "uniform" => {
            let (lo, hi) = range()?;
            Ok(ValuationDistribution::DiscreteUniform { lo, hi })
        }
        "bernoulli" => {
            let p: f64 = args.trim().parse()?;
            if !(0.0..=1.0).contains(&p) {
                bail!("bernoulli probability must lie in [0, 1]");
            }
            Ok(ValuationDistribution::Bernoulli { p })
        }
        "identical-uniform" => {
            let (lo, hi) = range()?;
            Ok(ValuationDistribution::IdenticalUniform { lo, hi })
        }
        "per-agent-uniform" => {
            let (lo, hi) = range()?;
            Ok(ValuationDistribution::PerAgentUniform { lo, hi })
        }
        other => bail!("unknown distribution {other:?}"),
    }
}

fn run(cli: Cli) -> Result<ExitCode> {
    match cli.command {
        Command::Check { instance, allocation } => cmd_check(&instance, &allocation, cli.format),
        Command::Solve { instance, algorithm, trace } => {
            cmd_solve(&instance, &algorithm, trace, cli.format)
        }
        Command::MinSubsidy { instance, exact, non_wasteful } => {
            cmd_min_subsidy(&instance, exact, non_wasteful, cli.format)
        }
        Command::Mwef { instance, allocation, budget } => {
            cmd_mwef(&instance, &allocation, &budget, cli.format)
        }
        Command::ExportLp { instance, out } => cmd_export_lp(&instance, out.as_deref()),
        Command::Gen { n, m, distribution, weights, seed, count, out } => {
            cmd_gen(n, m, &distribution, &weights, seed, count, out.as_deref())
        }
        Command::Bench { n, m_list, algorithm, distribution, weights, trials, seed, exact } => {
            cmd_bench(n, &m_list, &algorithm, &distribution, &weights, trials, seed, exact, cli.format)
        }
    }
}

/// The given-allocation worst-case bound `(W/w_min - 1) m V`.
fn given_allocation_bound(instance: &Instance) -> Rational {
    let w = instance.weights();
    let v = if instance.m() == 0 {
        rat_int(0)
    } else {
        instance.max_value_density().expect("m > 0")
    };
    (w.total() / w.min() - rat_int(1)) * rat_int(instance.m() as i64) * v
}

fn cmd_check(instance_path: &Path, allocation_path: &Path, format: Format) -> Result<ExitCode> {
    let instance = read_instance(instance_path)?;
    let allocation = read_allocation(allocation_path, &instance)?;
    let certificate = wefability(&instance, &allocation, WefMethod::Cycle)?;

    let mut body = json!({ "certificate": io::certificate_to_json(&certificate) });
    let mut exit = ExitCode::from(1);
    if certificate.is_stable() {
        exit = ExitCode::SUCCESS;
        let subsidies = min_subsidy_vector(&instance, &allocation)?;
        let bound = given_allocation_bound(&instance);
        body["subsidies"] = io::subsidies_to_json(&subsidies);
        body["total_subsidy"] = format_rational(&subsidies.total()).into();
        body["given_allocation_bound"] = format_rational(&bound).into();
        body["within_bound"] = (subsidies.total() <= bound).into();
    }
    if instance.valuations().is_additive_class() {
        let one = rat_int(1);
        let zero = rat_int(0);
        body["wef_0_0"] = check_wef_xy(&instance, &allocation, &zero, &zero)?.into();
        body["wef_0_1"] = check_wef_xy(&instance, &allocation, &zero, &one)?.into();
        body["wef_1_0"] = check_wef_xy(&instance, &allocation, &one, &zero)?.into();
        body["wef_1_1"] = check_wef_xy(&instance, &allocation, &one, &one)?.into();
        body["wwef1"] = check_wwef1(&instance, &allocation)?.into();
    }

    match format {
        Format::Json => println!("{}", serde_json::to_string_pretty(&body)?),
        _ => {
            match &certificate {
                WefabilityCertificate::Stable { .. } => {
                    println!("status: WEF-able");
                    println!("subsidies p*: {}", body["subsidies"]);
                    println!("total: {}", body["total_subsidy"].as_str().unwrap_or("0"));
                    println!(
                        "bound (W/w_min - 1) m V: {} (within: {})",
                        body["given_allocation_bound"].as_str().unwrap_or("-"),
                        body["within_bound"]
                    );
                }
                WefabilityCertificate::PositiveCycle { vertices, cost } => {
                    println!("status: not WEF-able");
                    println!("positive cycle: {vertices:?} with cost {}", format_rational(cost));
                }
            }
            if instance.valuations().is_additive_class() {
                println!(
                    "WEF(0,0)={} WEF(0,1)={} WEF(1,0)={} WEF(1,1)={} WWEF1={}",
                    body["wef_0_0"], body["wef_0_1"], body["wef_1_0"], body["wef_1_1"], body["wwef1"]
                );
            }
        }
    }
    Ok(exit)
}

fn cmd_solve(instance_path: &Path, algorithm: &str, trace: bool, format: Format) -> Result<ExitCode> {
    let instance = read_instance(instance_path)?;
    let kind: AlgorithmKind = algorithm.parse()?;
    let body = match run_algorithm(&instance, kind)? {
        SolveResult::Report(report) => io::report_to_json(&report, trace),
        SolveResult::Vcg(outcome) => io::vcg_to_json(&outcome),
    };
    match format {
        Format::Json => println!("{}", serde_json::to_string_pretty(&body)?),
        _ => {
            println!("algorithm: {kind}");
            println!("allocation (bundles): {}", body["allocation"]["bundles"]);
            if let Some(p) = body.get("payments") {
                println!("vcg payments: {p}");
            }
            println!("subsidies: {}", body["subsidies"]);
            if let Some(total) = body.get("total_subsidy") {
                println!("total: {total}");
            }
            if let Some(bound) = body.get("theoretical_bound") {
                println!("bound: {bound}");
            }
            if trace {
                println!("trace: {}", serde_json::to_string(&body["trace"])?);
            }
        }
    }
    Ok(ExitCode::SUCCESS)
}

fn cmd_min_subsidy(instance_path: &Path, exact: bool, non_wasteful: bool, format: Format) -> Result<ExitCode> {
    if !exact {
        bail!("the minimum-subsidy search is exhaustive; pass --exact to acknowledge the cost");
    }
    let instance = read_instance(instance_path)?;
    let result = if non_wasteful {
        match min_total_subsidy_non_wasteful(&instance)? {
            Some(result) => result,
            None => {
                println!("no non-wasteful allocation is WEF-able");
                return Ok(ExitCode::from(1));
            }
        }
    } else {
        min_total_subsidy_exhaustive(&instance)?
    };
    let body = io::oracle_to_json(&result);
    match format {
        Format::Json => println!("{}", serde_json::to_string_pretty(&body)?),
        _ => {
            println!("minimum total subsidy: {}", format_rational(&result.total));
            println!("allocation (bundles): {}", body["allocation"]["bundles"]);
            println!("subsidies: {}", body["subsidies"]);
            println!(
                "searched {} candidates, {} WEF-able",
                result.stats.candidates, result.stats.wefable
            );
        }
    }
    Ok(ExitCode::SUCCESS)
}

fn cmd_mwef(instance_path: &Path, allocation_path: &Path, budget: &str, format: Format) -> Result<ExitCode> {
    let instance = read_instance(instance_path)?;
    let allocation = read_allocation(allocation_path, &instance)?;
    let budget = parse_rational(budget)?;
    let outcome = distribute_budget(&instance, &allocation, &budget)?;
    let body = io::budget_to_json(&outcome);
    match format {
        Format::Json => println!("{}", serde_json::to_string_pretty(&body)?),
        _ => {
            println!("budget: {}", format_rational(&budget));
            println!("subsidies: {}", body["subsidies"]);
            println!("levels: {}", body["levels"]);
            for event in &outcome.events {
                println!(
                    "at spent {}: agents {:?} join the receiving set",
                    format_rational(&event.spent),
                    event.joined
                );
            }
        }
    }
    Ok(ExitCode::SUCCESS)
}

fn cmd_export_lp(instance_path: &Path, out: Option<&Path>) -> Result<ExitCode> {
    let instance = read_instance(instance_path)?;
    let text = lp::write_lp(&instance)?;
    match out {
        Some(path) => std::fs::write(path, text).with_context(|| format!("writing {}", path.display()))?,
        None => print!("{text}"),
    }
    Ok(ExitCode::SUCCESS)
}

fn cmd_gen(
    n: usize,
    m: usize,
    distribution: &str,
    weights: &Option<String>,
    seed: u64,
    count: usize,
    out: Option<&Path>,
) -> Result<ExitCode> {
    let distribution = parse_distribution(distribution)?;
    let rule = parse_weights(weights)?;
    for index in 0..count {
        let mut rng = trial_rng(seed, index as u64);
        let instance = generate_instance(n, m, &rule, &distribution, &mut rng)?;
        let text = serde_json::to_string_pretty(&io::instance_to_json(&instance))?;
        match out {
            None => println!("{text}"),
            Some(prefix) => {
                let path = if count == 1 {
                    prefix.to_path_buf()
                } else {
                    let stem = prefix.to_string_lossy();
                    PathBuf::from(format!("{stem}-{index:03}.json"))
                };
                std::fs::write(&path, text).with_context(|| format!("writing {}", path.display()))?;
                eprintln!("wrote {}", path.display());
            }
        }
    }
    Ok(ExitCode::SUCCESS)
}

#[allow(clippy::too_many_arguments)]
fn cmd_bench(
    n: usize,
    m_list: &Option<String>,
    algorithm: &str,
    distribution: &str,
    weights: &Option<String>,
    trials: usize,
    seed: u64,
    exact: bool,
    format: Format,
) -> Result<ExitCode> {
    let m_values = match m_list {
        None => (1..=5).map(|k| k * n).collect(),
        Some(list) => list
            .split(',')
            .map(|s| s.trim().parse::<usize>())
            .collect::<std::result::Result<Vec<_>, _>>()?,
    };
    let config = ExperimentConfig {
        n,
        m_values,
        weights: parse_weights(weights)?,
        distribution: parse_distribution(distribution)?,
        algorithm: algorithm.parse()?,
        trials,
        seed,
        exact,
    };
    let rows = run_bench(&config)?;
    match format {
        Format::Csv => print!("{}", rows_to_csv(&rows)),
        Format::Json => {
            let body: Vec<_> = rows
                .iter()
                .map(|r| {
                    json!({
                        "m": r.m,
                        "algorithm_mean": decimal_string(&r.algorithm_mean, 12),
                        "exact_min_mean": r.exact_mean.as_ref().map(|e| decimal_string(e, 12)),
                        "bound": decimal_string(&r.bound, 12),
                    })
                })
                .collect();
            println!("{}", serde_json::to_string_pretty(&body)?);
        }
        Format::Text => print!("{}", rows_to_text(&rows)),
    }
    Ok(ExitCode::SUCCESS)
}
