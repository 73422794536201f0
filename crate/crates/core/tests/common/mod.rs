//! Oracles shared by the integration tests and the acceptance suite. None of
//! them touch the floating-point code paths they check.

#![allow(dead_code)]

use num_bigint::{BigInt, BigUint};
use num_traits::{One, ToPrimitive, Zero};
use rand::Rng;

use fiq_core::{Fiq, Propensity};

/// Fixed-point scale of the information oracle, in bits.
const P: usize = 256;

/// `atanh(u / v) * 2^P` by its power series; needs `|u / v| <= 1/3`.
fn atanh_fixed(u: &BigInt, v: &BigInt) -> BigInt {
    let (u2, v2) = (u * u, v * v);
    let (mut num, mut den) = (u.clone(), v.clone());
    let mut sum = BigInt::zero();
    for k in 0u32.. {
        let term = (&num << P) / (&den * BigInt::from(2 * k + 1));
        if term.is_zero() {
            break;
        }
        sum += term;
        num *= &u2;
        den *= &v2;
    }
    sum
}

fn ln2_fixed() -> BigInt {
    atanh_fixed(&BigInt::one(), &BigInt::from(3)) * 2
}

/// `ln(n) * 2^P` for `n >= 1`: with `2^e <= n < 2^(e+1)`,
/// `ln n = e ln 2 + 2 atanh((n - 2^e) / (n + 2^e))`.
fn ln_fixed(n: &BigUint) -> BigInt {
    let e = n.bits() - 1;
    let base = BigInt::one() << e;
    let n = BigInt::from(n.clone());
    ln2_fixed() * BigInt::from(e) + atanh_fixed(&(&n - &base), &(&n + &base)) * 2
}

/// `(1 - H(a/b)) * 2^P` for `0 < a < b`.
fn digit_information_fixed(a: &BigUint, b: &BigUint) -> BigInt {
    let (la, lb, lc) = (ln_fixed(a), ln_fixed(b), ln_fixed(&(b - a)));
    let (ai, bi) = (BigInt::from(a.clone()), BigInt::from(b.clone()));
    let nats = (&ai * (&lb - &la) + (&bi - &ai) * (&lb - &lc)) / &bi;
    let bits = (nats << P) / ln2_fixed();
    (BigInt::one() << P) - bits
}

/// `N + sum(1 - H(q))` evaluated with 256-bit fixed-point logarithms.
pub fn information_oracle(f: &Fiq) -> f64 {
    let mut total = BigInt::from(f.determined_len()) << P;
    for q in f.window() {
        let a = q.numer().to_biguint().unwrap();
        let b = q.denom().to_biguint().unwrap();
        total += digit_information_fixed(&a, &b);
    }
    (total >> (P - 64)).to_f64().unwrap() / 2f64.powi(64)
}

/// A rational strictly inside (0, 1) with denominator below `max_den`.
pub fn random_open_propensity<R: Rng>(rng: &mut R, max_den: u64) -> Propensity {
    let d = rng.gen_range(2..max_den);
    let n = rng.gen_range(1..d);
    Propensity::from_ratio(n, d).unwrap()
}

pub fn random_fiq<R: Rng>(rng: &mut R, max_prefix: usize, max_window: usize) -> Fiq {
    let n = rng.gen_range(0..=max_prefix);
    let m = rng.gen_range(0..=max_window);
    let prefix = (0..n).map(|_| rng.gen()).collect();
    let window: Vec<_> = (0..m)
        .map(|_| random_open_propensity(rng, 1_000_000))
        .collect();
    Fiq::new(prefix, window, rng.gen_range(0..100)).unwrap()
}

/// The binary expansion of `n / d` by long division.
pub fn long_division(n: u64, d: u64, count: usize) -> Vec<bool> {
    let mut rem = n % d;
    (0..count)
        .map(|_| {
            rem *= 2;
            let bit = rem >= d;
            if bit {
                rem -= d;
            }
            bit
        })
        .collect()
}

/// Preperiod and period of `n / d` (reduced, `n < d`) found by running the
/// remainder map `r -> 2r mod d` until a remainder repeats.
pub fn cycle_of(n: u64, d: u64) -> (u64, u64) {
    let mut seen = std::collections::HashMap::new();
    let mut r = n % d;
    for step in 0u64.. {
        if let Some(first) = seen.insert(r, step) {
            return (first, step - first);
        }
        r = 2 * r % d;
    }
    unreachable!()
}
