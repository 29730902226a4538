//! LP-format export of the subsidy-minimization MILP.
//!
//! Objective: minimize the total subsidy. For every ordered agent pair the
//! WEF row
//!
//! ```text
//! sum_o v_i(o) x_{i,o} / w_i + p_i / w_i
//!   - sum_o v_i(o) x_{j,o} / w_j - p_j / w_j >= 0
//! ```
//!
//! plus one assignment row per item, binary `x_{i,o}` and `p_i >= 0`.
//! Coefficients with a terminating decimal expansion are written exactly;
//! otherwise the row is preceded by a comment carrying the exact rationals
//! and the coefficient is rounded to 12 significant digits.

use anyhow::{bail, Result};
use num_traits::{Signed, Zero};
use wefsub::model::Instance;
use wefsub::rational::{decimal_string, format_rational, has_finite_decimal, Rational};

struct Term {
    coefficient: Rational,
    variable: String,
}

fn push_terms(out: &mut String, terms: &[Term]) {
    let mut first = true;
    for term in terms {
        if term.coefficient.is_zero() {
            continue;
        }
        let magnitude = decimal_string(&term.coefficient.abs(), 12);
        if first {
            if term.coefficient.is_negative() {
                out.push_str("- ");
            }
            out.push_str(&format!("{} {}", magnitude, term.variable));
            first = false;
        } else {
            let sign = if term.coefficient.is_negative() { '-' } else { '+' };
            out.push_str(&format!(" {sign} {} {}", magnitude, term.variable));
        }
    }
    if first {
        out.push('0');
    }
}

/// Render the MILP for `instance` in LP text format.
pub fn write_lp(instance: &Instance) -> Result<String> {
    if !instance.valuations().is_additive_class() {
        bail!(
            "unsupported profile: LP export needs an additive-class profile, got {}",
            instance.valuations().variant_name()
        );
    }
    let n = instance.n();
    let m = instance.m();
    let w = instance.weights();

    let mut out = String::new();
    out.push_str("\\ weighted envy-freeness: minimum total subsidy\n");
    out.push_str(&format!("\\ agents: {n}, items: {m}\n"));
    out.push_str("Minimize\n obj: ");
    let objective: Vec<Term> = (0..n)
        .map(|i| Term { coefficient: Rational::from_integer(1.into()), variable: format!("p_{i}") })
        .collect();
    push_terms(&mut out, &objective);
    out.push_str("\nSubject To\n");

    for i in 0..n {
        for j in 0..n {
            if i == j {
                continue;
            }
            let mut terms = Vec::with_capacity(2 * m + 2);
            for o in 0..m {
                let v = instance.valuations().item_value(i, o);
                if v.is_zero() {
                    continue;
                }
                terms.push(Term { coefficient: &v / w.get(i), variable: format!("x_{i}_{o}") });
                terms.push(Term { coefficient: -(&v / w.get(j)), variable: format!("x_{j}_{o}") });
            }
            terms.push(Term {
                coefficient: Rational::from_integer(1.into()) / w.get(i),
                variable: format!("p_{i}"),
            });
            terms.push(Term {
                coefficient: -(Rational::from_integer(1.into()) / w.get(j)),
                variable: format!("p_{j}"),
            });
            if terms.iter().any(|t| !has_finite_decimal(&t.coefficient)) {
                out.push_str(&format!("\\ wef_{i}_{j} exact coefficients:"));
                for term in &terms {
                    if !term.coefficient.is_zero() {
                        out.push_str(&format!(" {} {}", format_rational(&term.coefficient), term.variable));
                    }
                }
                out.push('\n');
            }
            out.push_str(&format!(" wef_{i}_{j}: "));
            push_terms(&mut out, &terms);
            out.push_str(" >= 0\n");
        }
    }
    for o in 0..m {
        let terms: Vec<Term> = (0..n)
            .map(|i| Term { coefficient: Rational::from_integer(1.into()), variable: format!("x_{i}_{o}") })
            .collect();
        out.push_str(&format!(" assign_{o}: "));
        push_terms(&mut out, &terms);
        out.push_str(" = 1\n");
    }

    out.push_str("Bounds\n");
    for i in 0..n {
        out.push_str(&format!(" p_{i} >= 0\n"));
    }
    out.push_str("Binaries\n");
    for i in 0..n {
        for o in 0..m {
            out.push_str(&format!(" x_{i}_{o}\n"));
        }
    }
    out.push_str("End\n");
    Ok(out)
}
