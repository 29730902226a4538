//! Exact rational arithmetic helpers.
//!
//! Every numeric quantity in this crate (values, weights, subsidies, envy
//! costs, bounds) is a [`Rational`]: an arbitrary-precision fraction kept in
//! lowest terms with a positive denominator. The type itself comes from
//! `num-rational`; this module adds parsing, display and decimal rendering in
//! the conventions used by the JSON and LP interfaces.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::Error;

/// Arbitrary-precision rational number, always in lowest terms, denominator > 0.
pub type Rational = num_rational::BigRational;

/// `n` as a rational.
pub fn rat_int(n: i64) -> Rational {
    Rational::from_integer(BigInt::from(n))
}

/// `n / d` as a rational (reduced). Panics if `d == 0`.
pub fn rat(n: i64, d: i64) -> Rational {
    Rational::new(BigInt::from(n), BigInt::from(d))
}

/// Parse `"p/q"` or an integer literal `"p"`.
pub fn parse_rational(s: &str) -> Result<Rational, Error> {
    let bad = |reason: &str| Error::BadRational { literal: s.to_string(), reason: reason.to_string() };
    let s = s.trim();
    if s.is_empty() {
        return Err(bad("empty"));
    }
    match s.split_once('/') {
        None => {
            let n: BigInt = s.parse().map_err(|_| bad("not an integer"))?;
            Ok(Rational::from_integer(n))
        }
        Some((num, den)) => {
            let n: BigInt = num.trim().parse().map_err(|_| bad("bad numerator"))?;
            let d: BigInt = den.trim().parse().map_err(|_| bad("bad denominator"))?;
            if d.is_zero() {
                return Err(bad("zero denominator"));
            }
            Ok(Rational::new(n, d))
        }
    }
}

/// Render as `"p/q"`, or just `"p"` for integers. Inverse of [`parse_rational`].
pub fn format_rational(r: &Rational) -> String {
    if r.denom().is_one() {
        r.numer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

/// True when the reduced denominator is of the form `2^a * 5^b`, i.e. the
/// value has a finite decimal expansion.
pub fn has_finite_decimal(r: &Rational) -> bool {
    let mut d = r.denom().clone();
    for p in [2u32, 5u32] {
        let p = BigInt::from(p);
        while (&d % &p).is_zero() {
            d /= &p;
        }
    }
    d.is_one()
}

/// Exact decimal string for a rational with a finite expansion.
///
/// Returns `None` when the expansion does not terminate; use
/// [`decimal_approx`] in that case.
pub fn exact_decimal(r: &Rational) -> Option<String> {
    if !has_finite_decimal(r) {
        return None;
    }
    if r.denom().is_one() {
        return Some(r.numer().to_string());
    }
    // Scale the denominator up to a power of ten.
    let mut d = r.denom().clone();
    let (mut twos, mut fives) = (0u32, 0u32);
    let two = BigInt::from(2);
    let five = BigInt::from(5);
    while (&d % &two).is_zero() {
        d /= &two;
        twos += 1;
    }
    while (&d % &five).is_zero() {
        d /= &five;
        fives += 1;
    }
    let digits = twos.max(fives);
    let scale = BigInt::from(10).pow(digits);
    let scaled = (r.numer() * &scale) / r.denom();
    let neg = scaled.is_negative();
    let mut s = scaled.abs().to_string();
    let digits = digits as usize;
    if s.len() <= digits {
        s = format!("{}{}", "0".repeat(digits - s.len() + 1), s);
    }
    s.insert(s.len() - digits, '.');
    let trimmed = s.trim_end_matches('0').trim_end_matches('.').to_string();
    Some(if neg { format!("-{trimmed}") } else { trimmed })
}

/// Decimal rendering to `sig` significant digits (round half away from zero).
pub fn decimal_approx(r: &Rational, sig: u32) -> String {
    if r.is_zero() {
        return "0".to_string();
    }
    // exponent e such that 10^e <= |r| < 10^(e+1)
    let abs = r.abs();
    let mut e: i64 = 0;
    let one = Rational::one();
    let ten = rat_int(10);
    let mut probe = abs.clone();
    if probe >= one {
        while probe >= ten {
            probe /= &ten;
            e += 1;
        }
    } else {
        while probe < one {
            probe *= &ten;
            e -= 1;
        }
    }
    let shift = sig as i64 - 1 - e;
    let pow = BigInt::from(10).pow(shift.unsigned_abs() as u32);
    let scaled = if shift >= 0 {
        abs.clone() * Rational::from_integer(pow.clone())
    } else {
        abs.clone() / Rational::from_integer(pow.clone())
    };
    // round half away from zero
    let rounded = (scaled + rat(1, 2)).floor().to_integer();
    let mantissa = Rational::from_integer(rounded);
    let value = if shift >= 0 {
        mantissa / Rational::from_integer(pow)
    } else {
        mantissa * Rational::from_integer(pow)
    };
    let value = if r.is_negative() { -value } else { value };
    exact_decimal(&value).unwrap_or_else(|| format_rational(&value))
}

/// Decimal rendering: exact when finite, otherwise `sig` significant digits.
pub fn decimal_string(r: &Rational, sig: u32) -> String {
    exact_decimal(r).unwrap_or_else(|| decimal_approx(r, sig))
}

/// gcd of a slice of big integers (absolute values).
pub fn gcd_all(values: &[BigInt]) -> BigInt {
    values.iter().fold(BigInt::zero(), |acc, v| acc.gcd(v))
}

/// lcm of a slice of big integers.
pub fn lcm_all(values: &[BigInt]) -> BigInt {
    values.iter().fold(BigInt::one(), |acc, v| acc.lcm(v))
}

/// Try to read a rational as an `i64`-valued integer.
pub fn to_i64(r: &Rational) -> Option<i64> {
    if r.denom().is_one() {
        r.numer().to_i64()
    } else {
        None
    }
}
