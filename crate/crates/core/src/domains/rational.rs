use std::fmt;
use std::str::FromStr;

use num_bigint::BigUint;
use num_rational::BigRational;
use num_traits::{One, Zero};
use serde::Serialize;

use super::{check_position, DigitSource, Precision};
use crate::error::{DomainError, ParseError};
use crate::ratio;

/// An exact rational in `[0, 1)`. Every digit is fixed in advance and the
/// binary expansion is eventually periodic.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct RationalQuantity {
    value: BigRational,
}

/// Shape of an eventually periodic binary expansion: `preperiod` digits
/// followed by a block of `period` digits repeated forever.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct ExpansionPeriod {
    pub preperiod: u64,
    pub period: u64,
    /// `true` when the repeating block is all zeros.
    pub terminating: bool,
}

/// Denominators whose odd part has a longer order than this are reported
/// without a period.
const ORDER_SEARCH_LIMIT: u64 = 1 << 22;

impl RationalQuantity {
    pub fn new(value: BigRational) -> Result<Self, DomainError> {
        if !ratio::in_unit_interval(&value) {
            return Err(DomainError::OutOfUnitInterval(ratio::format_rational(
                &value,
            )));
        }
        Ok(RationalQuantity { value })
    }

    pub fn from_ratio(numer: u64, denom: u64) -> Result<Self, DomainError> {
        if denom == 0 {
            return Err(DomainError::OutOfUnitInterval(format!("{numer}/0")));
        }
        Self::new(BigRational::new(numer.into(), denom.into()))
    }

    /// Wraps `value` mod 1 into `[0, 1)`.
    pub fn wrapping(value: BigRational) -> Self {
        RationalQuantity {
            value: ratio::frac(&value),
        }
    }

    pub fn value(&self) -> &BigRational {
        &self.value
    }

    fn parts(&self) -> (BigUint, BigUint) {
        (
            self.value.numer().magnitude().clone(),
            self.value.denom().magnitude().clone(),
        )
    }

    /// Preperiod and period of the binary expansion. The period is the
    /// multiplicative order of 2 modulo the odd part of the denominator;
    /// `None` when that order exceeds an internal search limit.
    pub fn expansion_period(&self) -> Option<ExpansionPeriod> {
        let (numer, denom) = self.parts();
        let (twos, odd) = ratio::split_power_of_two(&denom);
        let period = ratio::multiplicative_order_of_two(&odd, ORDER_SEARCH_LIMIT)?;
        Some(ExpansionPeriod {
            preperiod: twos,
            period,
            terminating: odd.is_one() || numer.is_zero(),
        })
    }

    /// `x -> 2^s x mod 1`, returning the `s` digits shifted past the radix
    /// point.
    pub fn shifted(&self, s: u64) -> (RationalQuantity, Vec<bool>) {
        let emitted = (1..=s).map(|j| self.digit_unchecked(j)).collect();
        let (numer, denom) = self.parts();
        let two_s = BigUint::from(2u32).modpow(&BigUint::from(s), &denom);
        let rem = (numer * two_s) % &denom;
        let next = BigRational::new(rem.into(), denom.into());
        (RationalQuantity { value: next }, emitted)
    }

    fn digit_unchecked(&self, j: u64) -> bool {
        // digit j = floor(2 * frac(2^(j-1) x))
        let (numer, denom) = self.parts();
        let pow = BigUint::from(2u32).modpow(&BigUint::from(j - 1), &denom);
        let rem = (numer * pow) % &denom;
        rem << 1u32 >= denom
    }
}

impl DigitSource for RationalQuantity {
    fn digit_at(&self, j: u64) -> Result<bool, DomainError> {
        check_position(j)?;
        Ok(self.digit_unchecked(j))
    }

    fn known_precision(&self) -> Precision {
        Precision::Unbounded
    }

    fn digits(&self, count: u64) -> Result<Vec<bool>, DomainError> {
        // long division: one remainder update per digit
        let (numer, denom) = self.parts();
        let mut rem = numer;
        let mut out = Vec::with_capacity(count as usize);
        for _ in 0..count {
            rem <<= 1u32;
            let bit = rem >= denom;
            if bit {
                rem -= &denom;
            }
            out.push(bit);
        }
        Ok(out)
    }
}

impl fmt::Display for RationalQuantity {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "rational:{}", ratio::format_rational(&self.value))
    }
}

impl FromStr for RationalQuantity {
    type Err = ParseError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Ok(RationalQuantity::new(ratio::parse_rational(s)?)?)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn r(n: u64, d: u64) -> RationalQuantity {
        RationalQuantity::from_ratio(n, d).unwrap()
    }

    #[test]
    fn one_third_alternates() {
        let x = r(1, 3);
        let by_index: Vec<bool> = (1..=4).map(|j| x.digit_at(j).unwrap()).collect();
        assert_eq!(by_index, vec![false, true, false, true]);
        assert_eq!(x.digits(4).unwrap(), by_index);
    }

    #[test]
    fn random_access_matches_long_division() {
        let x = r(22, 97);
        let seq = x.digits(300).unwrap();
        for (j, &bit) in seq.iter().enumerate() {
            assert_eq!(x.digit_at(j as u64 + 1).unwrap(), bit);
        }
    }

    #[test]
    fn periods() {
        let p = r(1, 5).expansion_period().unwrap();
        assert_eq!((p.preperiod, p.period, p.terminating), (0, 4, false));
        let p = r(3, 8).expansion_period().unwrap();
        assert_eq!((p.preperiod, p.terminating), (3, true));
        let p = r(1, 12).expansion_period().unwrap();
        assert_eq!((p.preperiod, p.period), (2, 2));
    }

    #[test]
    fn shift_by_doubling() {
        let (next, emitted) = r(11, 16).shifted(1);
        assert_eq!(next, r(3, 8));
        assert_eq!(emitted, vec![true]);
        let (next, emitted) = r(1, 3).shifted(2);
        assert_eq!(next, r(1, 3));
        assert_eq!(emitted, vec![false, true]);
    }

    #[test]
    fn rejects_outside_unit_interval() {
        assert!("1/1".parse::<RationalQuantity>().is_err());
        assert!("-1/3".parse::<RationalQuantity>().is_err());
        assert!("0".parse::<RationalQuantity>().is_ok());
    }
}
