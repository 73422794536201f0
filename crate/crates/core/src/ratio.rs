//! Small helpers around `BigRational` shared by every module.

use num_bigint::{BigInt, BigUint, Sign};
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::ParseError;

/// Parses `"p/q"` or a bare integer `"p"` into a reduced rational.
pub fn parse_rational(input: &str) -> Result<BigRational, ParseError> {
    let s = input.trim();
    let bad = || ParseError::Rational(input.to_string());
    let (num, den) = match s.split_once('/') {
        Some((n, d)) => (n.trim(), d.trim()),
        None => (s, "1"),
    };
    let num: BigInt = num.parse().map_err(|_| bad())?;
    let den: BigInt = den.parse().map_err(|_| bad())?;
    if den.is_zero() {
        return Err(bad());
    }
    Ok(BigRational::new(num, den))
}

/// Renders a rational as `"p/q"` (or `"p"` when the denominator is one).
pub fn format_rational(r: &BigRational) -> String {
    if r.denom().is_one() {
        r.numer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

/// If the rational's denominator is `2^a`, returns `a`.
pub fn dyadic_exponent(r: &BigRational) -> Option<u64> {
    let den = r.denom().magnitude();
    if den.is_zero() {
        return None;
    }
    let tz = den.trailing_zeros().unwrap_or(0);
    if (den >> tz).is_one() {
        Some(tz)
    } else {
        None
    }
}

/// Splits `d = 2^a * m` with `m` odd.
pub fn split_power_of_two(d: &BigUint) -> (u64, BigUint) {
    let tz = d.trailing_zeros().unwrap_or(0);
    (tz, d >> tz)
}

/// Multiplicative order of 2 modulo odd `m`, searched up to `limit` steps.
/// Returns `Some(1)` for `m == 1`.
pub fn multiplicative_order_of_two(m: &BigUint, limit: u64) -> Option<u64> {
    if m.is_one() {
        return Some(1);
    }
    if m.is_even() || m.is_zero() {
        return None;
    }
    let two = BigUint::from(2u32);
    let mut acc = &two % m;
    for k in 1..=limit {
        if acc.is_one() {
            return Some(k);
        }
        acc = (acc * &two) % m;
    }
    None
}

/// Fractional part of a nonnegative rational.
pub fn frac(r: &BigRational) -> BigRational {
    r - r.floor()
}

/// `true` when `0 <= r < 1`.
pub fn in_unit_interval(r: &BigRational) -> bool {
    !r.is_negative() && r < &BigRational::one()
}

/// Converts a bit slice (most significant first) into the dyadic rational
/// `0.b1 b2 ... bn` in base two.
pub fn bits_to_rational(bits: &[bool]) -> BigRational {
    let mut numer = BigUint::zero();
    for &b in bits {
        numer <<= 1u32;
        if b {
            numer += 1u32;
        }
    }
    let denom = BigUint::one() << bits.len();
    BigRational::new(
        BigInt::from_biguint(Sign::Plus, numer),
        BigInt::from_biguint(Sign::Plus, denom),
    )
}

/// Best-effort conversion to `f64`; rationals too large for `f64` saturate.
pub fn to_f64(r: &BigRational) -> f64 {
    r.to_f64().unwrap_or_else(|| {
        if r.is_negative() {
            f64::NEG_INFINITY
        } else {
            f64::INFINITY
        }
    })
}

/// Renders a bit slice as a `'0'`/`'1'` string.
pub fn bits_to_string(bits: &[bool]) -> String {
    bits.iter().map(|&b| if b { '1' } else { '0' }).collect()
}
