//! JSON interchange for instances, allocations and result objects.
//!
//! Rationals travel as strings, either `"p/q"` or a plain integer string, so
//! round trips are bit-exact. The instance schema is
//!
//! ```json
//! { "weights": ["1", "7/2"],
//!   "valuations": { "type": "identical_additive", "items": ["1", "1", "1"] } }
//! ```
//!
//! with the other `type` tags being `additive` (row-major `matrix`),
//! `binary` (0/1 `matrix`), `identical_items` (`per_agent` plus `m`),
//! `capped` (`caps` plus `m`) and `table` (`bundles`: one map per agent from
//! a decimal bitmask string to the bundle value).

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use crate::allocators::{AllocatorReport, VcgOutcome};
use crate::envy::WefabilityCertificate;
use crate::error::Error;
use crate::model::{Allocation, Instance, SubsidyVector, ValuationProfile, Weights};
use crate::mwef::BudgetedOutcome;
use crate::oracle::OracleResult;
use crate::rational::{format_rational, parse_rational, Rational};
use crate::Result;

#[derive(Serialize, Deserialize)]
struct InstanceDto {
    weights: Vec<String>,
    valuations: ValuationDto,
}

#[derive(Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
enum ValuationDto {
    Additive { matrix: Vec<Vec<String>> },
    Binary { matrix: Vec<Vec<u8>> },
    IdenticalAdditive { items: Vec<String> },
    IdenticalItems { per_agent: Vec<String>, m: usize },
    Capped { caps: Vec<String>, m: usize },
    Table { bundles: Vec<BTreeMap<String, String>> },
}

fn parse_vec(values: &[String]) -> Result<Vec<Rational>> {
    values.iter().map(|s| parse_rational(s)).collect()
}

fn format_vec(values: &[Rational]) -> Vec<String> {
    values.iter().map(format_rational).collect()
}

fn json_error(err: serde_json::Error) -> Error {
    Error::Parse(format!("line {}, column {}: {}", err.line(), err.column(), err))
}

/// Parse an instance from its JSON representation.
pub fn parse_instance(text: &str) -> Result<Instance> {
    let dto: InstanceDto = serde_json::from_str(text).map_err(json_error)?;
    let weights = Weights::new(parse_vec(&dto.weights)?)?;
    let profile = match dto.valuations {
        ValuationDto::Additive { matrix } => {
            let rows = matrix.iter().map(|r| parse_vec(r)).collect::<Result<_>>()?;
            ValuationProfile::additive(rows)?
        }
        ValuationDto::Binary { matrix } => {
            let mut rows = Vec::with_capacity(matrix.len());
            for row in &matrix {
                let mut bits = Vec::with_capacity(row.len());
                for &b in row {
                    match b {
                        0 => bits.push(false),
                        1 => bits.push(true),
                        other => return Err(Error::Parse(format!("binary entries must be 0 or 1, got {other}"))),
                    }
                }
                rows.push(bits);
            }
            ValuationProfile::binary(rows)?
        }
        ValuationDto::IdenticalAdditive { items } => ValuationProfile::identical_additive(parse_vec(&items)?)?,
        ValuationDto::IdenticalItems { per_agent, m } => {
            ValuationProfile::identical_items(parse_vec(&per_agent)?, m)?
        }
        ValuationDto::Capped { caps, m } => ValuationProfile::capped(parse_vec(&caps)?, m)?,
        ValuationDto::Table { bundles } => {
            let mut rows = Vec::with_capacity(bundles.len());
            for (agent, table) in bundles.iter().enumerate() {
                let size = table.len();
                let mut row = vec![None; size];
                for (key, value) in table {
                    let mask: usize = key
                        .parse()
                        .map_err(|_| Error::Parse(format!("agent {agent}: bad bitmask key {key:?}")))?;
                    if mask >= size {
                        return Err(Error::Parse(format!(
                            "agent {agent}: bitmask {mask} out of range for {size} entries"
                        )));
                    }
                    row[mask] = Some(parse_rational(value)?);
                }
                let row: Option<Vec<Rational>> = row.into_iter().collect();
                rows.push(row.ok_or_else(|| {
                    Error::Parse(format!("agent {agent}: table must cover masks 0..{size}"))
                })?);
            }
            ValuationProfile::table(rows)?
        }
    };
    Instance::new(weights, profile)
}

/// Serialize an instance; `parse_instance` inverts this bit-exactly.
pub fn instance_to_json(instance: &Instance) -> Value {
    let valuations = match instance.valuations() {
        ValuationProfile::Additive { matrix } => ValuationDto::Additive {
            matrix: matrix.iter().map(|r| format_vec(r)).collect(),
        },
        ValuationProfile::Binary { matrix } => ValuationDto::Binary {
            matrix: matrix
                .iter()
                .map(|r| r.iter().map(|&b| u8::from(b)).collect())
                .collect(),
        },
        ValuationProfile::IdenticalAdditive { items } => {
            ValuationDto::IdenticalAdditive { items: format_vec(items) }
        }
        ValuationProfile::IdenticalItems { per_agent, m } => ValuationDto::IdenticalItems {
            per_agent: format_vec(per_agent),
            m: *m,
        },
        ValuationProfile::Capped { caps, m } => ValuationDto::Capped { caps: format_vec(caps), m: *m },
        ValuationProfile::Table { bundles, .. } => ValuationDto::Table {
            bundles: bundles
                .iter()
                .map(|row| {
                    row.iter()
                        .enumerate()
                        .map(|(mask, v)| (mask.to_string(), format_rational(v)))
                        .collect()
                })
                .collect(),
        },
    };
    let dto = InstanceDto {
        weights: format_vec(instance.weights().as_slice()),
        valuations,
    };
    serde_json::to_value(dto).expect("instance serialization is infallible")
}

#[derive(Serialize, Deserialize)]
struct AllocationDto {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    owner: Option<Vec<usize>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    counts: Option<Vec<usize>>,
}

/// Parse an allocation, either `{"owner": [..]}` (item -> agent) or
/// `{"counts": [..]}` (identical-items count form), validated against the
/// instance dimensions.
pub fn parse_allocation(text: &str, instance: &Instance) -> Result<Allocation> {
    let dto: AllocationDto = serde_json::from_str(text).map_err(json_error)?;
    match (dto.owner, dto.counts) {
        (Some(owner), None) => {
            if owner.len() != instance.m() {
                return Err(Error::DimensionMismatch(format!(
                    "owner vector has {} entries, instance has {} items",
                    owner.len(),
                    instance.m()
                )));
            }
            Allocation::from_owners(owner, instance.n())
        }
        (None, Some(counts)) => {
            if counts.len() != instance.n() {
                return Err(Error::DimensionMismatch(format!(
                    "counts vector has {} entries, instance has {} agents",
                    counts.len(),
                    instance.n()
                )));
            }
            let total: usize = counts.iter().sum();
            if total != instance.m() {
                return Err(Error::DimensionMismatch(format!(
                    "counts sum to {total}, instance has {} items",
                    instance.m()
                )));
            }
            Ok(Allocation::from_counts(&counts))
        }
        _ => Err(Error::Parse("allocation needs exactly one of \"owner\" or \"counts\"".into())),
    }
}

pub fn allocation_to_json(allocation: &Allocation) -> Value {
    json!({
        "owner": allocation.owners(),
        "bundles": allocation.bundles(),
        "counts": allocation.counts(),
    })
}

pub fn subsidies_to_json(subsidies: &SubsidyVector) -> Value {
    Value::from(format_vec(subsidies.as_slice()))
}

pub fn certificate_to_json(certificate: &WefabilityCertificate) -> Value {
    match certificate {
        WefabilityCertificate::Stable { longest_path_costs } => json!({
            "status": "wefable",
            "longest_path_costs": format_vec(longest_path_costs),
        }),
        WefabilityCertificate::PositiveCycle { vertices, cost } => json!({
            "status": "positive_cycle",
            "vertices": vertices,
            "cost": format_rational(cost),
        }),
    }
}

pub fn report_to_json(report: &AllocatorReport, with_trace: bool) -> Value {
    let mut value = json!({
        "allocation": allocation_to_json(&report.allocation),
        "subsidies": subsidies_to_json(&report.subsidies),
        "total_subsidy": format_rational(&report.total_subsidy),
        "theoretical_bound": format_rational(&report.theoretical_bound),
    });
    if with_trace {
        value["trace"] = serde_json::to_value(&report.trace).expect("trace serialization is infallible");
    }
    value
}

pub fn vcg_to_json(outcome: &VcgOutcome) -> Value {
    json!({
        "allocation": allocation_to_json(&outcome.allocation),
        "payments": format_vec(&outcome.payments),
        "upfront_rate": format_rational(&outcome.upfront_rate),
        "subsidies": subsidies_to_json(&outcome.subsidies),
    })
}

pub fn oracle_to_json(result: &OracleResult) -> Value {
    json!({
        "allocation": allocation_to_json(&result.allocation),
        "subsidies": subsidies_to_json(&result.subsidies),
        "total_subsidy": format_rational(&result.total),
        "stats": {
            "candidates": result.stats.candidates,
            "wefable": result.stats.wefable,
        },
    })
}

pub fn budget_to_json(outcome: &BudgetedOutcome) -> Value {
    json!({
        "subsidies": subsidies_to_json(&outcome.subsidies),
        "total": format_rational(&outcome.subsidies.total()),
        "levels": format_vec(&outcome.levels),
        "events": outcome
            .events
            .iter()
            .map(|e| json!({ "spent": format_rational(&e.spent), "joined": e.joined }))
            .collect::<Vec<_>>(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::{rat, rat_int};

    fn round_trip(instance: &Instance) {
        let text = serde_json::to_string(&instance_to_json(instance)).unwrap();
        let back = parse_instance(&text).unwrap();
        assert_eq!(&back, instance);
    }

    #[test]
    fn all_profile_variants_round_trip() {
        let weights = Weights::new(vec![rat_int(1), rat(7, 2)]).unwrap();
        round_trip(
            &Instance::new(
                weights.clone(),
                ValuationProfile::additive(vec![
                    vec![rat_int(5), rat(1, 3)],
                    vec![rat_int(10), rat_int(8)],
                ])
                .unwrap(),
            )
            .unwrap(),
        );
        round_trip(
            &Instance::new(
                weights.clone(),
                ValuationProfile::binary(vec![vec![true, false], vec![false, true]]).unwrap(),
            )
            .unwrap(),
        );
        round_trip(
            &Instance::new(
                weights.clone(),
                ValuationProfile::identical_additive(vec![rat_int(1), rat(2, 7)]).unwrap(),
            )
            .unwrap(),
        );
        round_trip(
            &Instance::new(
                weights.clone(),
                ValuationProfile::identical_items(vec![rat_int(5), rat_int(6)], 4).unwrap(),
            )
            .unwrap(),
        );
        round_trip(
            &Instance::new(
                weights.clone(),
                ValuationProfile::capped(vec![rat_int(2), rat(3, 2)], 6).unwrap(),
            )
            .unwrap(),
        );
        round_trip(
            &Instance::new(
                weights,
                ValuationProfile::table(vec![
                    vec![rat_int(0), rat_int(1), rat_int(2), rat_int(4)],
                    vec![rat_int(0), rat_int(2), rat_int(2), rat_int(3)],
                ])
                .unwrap(),
            )
            .unwrap(),
        );
    }

    #[test]
    fn spec_example_parses() {
        let text = r#"{ "weights": ["1","7/2"],
                        "valuations": {"type":"identical_additive","items":["1","1","1"]} }"#;
        let inst = parse_instance(text).unwrap();
        assert_eq!(inst.n(), 2);
        assert_eq!(inst.m(), 3);
        assert_eq!(inst.weights().get(1), &rat(7, 2));
    }

    #[test]
    fn parse_errors_carry_position_context() {
        let err = parse_instance("{ \"weights\": [\n  5 ] }").unwrap_err();
        let msg = err.to_string();
        assert!(msg.contains("line"), "missing location in {msg}");
    }

    #[test]
    fn allocation_parsing_validates_dimensions() {
        let inst = parse_instance(
            r#"{ "weights": ["1","1"], "valuations": {"type":"identical_additive","items":["1","1","1"]} }"#,
        )
        .unwrap();
        let alloc = parse_allocation(r#"{"owner": [0, 1, 1]}"#, &inst).unwrap();
        assert_eq!(alloc.counts(), vec![1, 2]);
        let alloc = parse_allocation(r#"{"counts": [2, 1]}"#, &inst).unwrap();
        assert_eq!(alloc.owners(), &[0, 0, 1]);
        assert!(parse_allocation(r#"{"owner": [0, 1]}"#, &inst).is_err());
        assert!(parse_allocation(r#"{"counts": [1, 1]}"#, &inst).is_err());
        assert!(parse_allocation(r#"{"owner": [0,1,1], "counts": [1,2]}"#, &inst).is_err());
        assert!(parse_allocation(r#"{}"#, &inst).is_err());
    }

    #[test]
    fn binary_entries_must_be_bits() {
        let text = r#"{ "weights": ["1"], "valuations": {"type":"binary","matrix":[[2]]} }"#;
        assert!(parse_instance(text).is_err());
    }

    mod properties {
        use super::*;
        use proptest::prelude::*;

        fn rational_strategy() -> impl Strategy<Value = Rational> {
            (-1000i64..1000, 1i64..100).prop_map(|(n, d)| crate::rational::rat(n, d))
        }

        proptest! {
            #[test]
            fn additive_instances_round_trip_bit_exactly(
                weights in proptest::collection::vec((1i64..50, 1i64..10), 1..5),
                rows in 1usize..5,
                cols in 0usize..5,
                cells in proptest::collection::vec((0i64..1000, 1i64..100), 25),
            ) {
                let n = rows.min(weights.len());
                let weights = Weights::new(
                    weights[..n].iter().map(|&(a, b)| crate::rational::rat(a, b)).collect()
                ).unwrap();
                let matrix: Vec<Vec<Rational>> = (0..n)
                    .map(|i| (0..cols).map(|o| {
                        let (a, b) = cells[(i * cols + o) % cells.len()];
                        crate::rational::rat(a, b)
                    }).collect())
                    .collect();
                let inst = Instance::new(weights, ValuationProfile::additive(matrix).unwrap()).unwrap();
                let text = serde_json::to_string(&instance_to_json(&inst)).unwrap();
                prop_assert_eq!(parse_instance(&text).unwrap(), inst);
            }

            #[test]
            fn rational_strings_survive_the_wire(r in rational_strategy()) {
                let s = format_rational(&r);
                prop_assert_eq!(parse_rational(&s).unwrap(), r);
            }
        }
    }
}
