use num_bigint::BigUint;
use num_traits::Zero;

use super::RandomBits;
use crate::propensity::Propensity;

/// Draws one digit that is 1 with probability exactly `q`.
///
/// A uniform `U = 0.u1 u2 ...` is generated lazily and compared bit by bit
/// with the binary expansion of `q`; the digit is 1 iff `U < q`. The first
/// differing position decides, so on average two random bits are consumed
/// and no floating point is involved. Certain propensities consume nothing.
pub fn sample_digit<R: RandomBits + ?Sized>(q: &Propensity, rng: &mut R) -> bool {
    if q.is_certain() {
        return q.numer() == q.denom();
    }
    match q.small_parts() {
        Some((n, d)) => compare_small(n, d, rng),
        None => compare_big(
            q.numer().magnitude().clone(),
            q.denom().magnitude().clone(),
            rng,
        ),
    }
}

/// A tail digit: propensity 1/2. Equivalent to `sample_digit(&half, rng)`.
pub fn sample_fair<R: RandomBits + ?Sized>(rng: &mut R) -> bool {
    // q = 0.1000...: u = 0 decides U < q; u = 1 ties and the zero tail of q
    // then decides U >= q.
    !rng.next_bit()
}

fn compare_small<R: RandomBits + ?Sized>(numer: u64, denom: u64, rng: &mut R) -> bool {
    let d = u128::from(denom);
    let mut rem = u128::from(numer);
    loop {
        rem <<= 1;
        let q_bit = rem >= d;
        if q_bit {
            rem -= d;
        }
        let u_bit = rng.next_bit();
        if u_bit != q_bit {
            return q_bit;
        }
        if rem == 0 {
            return false;
        }
    }
}

fn compare_big<R: RandomBits + ?Sized>(mut rem: BigUint, denom: BigUint, rng: &mut R) -> bool {
    loop {
        rem <<= 1u32;
        let q_bit = rem >= denom;
        if q_bit {
            rem -= &denom;
        }
        let u_bit = rng.next_bit();
        if u_bit != q_bit {
            return q_bit;
        }
        if rem.is_zero() {
            return false;
        }
    }
}
