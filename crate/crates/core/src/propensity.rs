//! Exact rational propensities and their entropy.

use std::fmt;
use std::str::FromStr;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{FiqError, ParseError};
use crate::ratio;

/// The tendency of a single binary digit to actualize as 1.
///
/// Stored as an exact reduced fraction in `[0, 1]`; floating point only
/// appears in derived diagnostics such as [`binary_entropy`].
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Propensity(BigRational);

impl Propensity {
    pub fn new(value: BigRational) -> Result<Self, FiqError> {
        if value.is_negative() || value > BigRational::one() {
            return Err(FiqError::PropensityOutOfRange(ratio::format_rational(
                &value,
            )));
        }
        Ok(Propensity(value))
    }

    pub fn from_ratio(numer: u64, denom: u64) -> Result<Self, FiqError> {
        if denom == 0 {
            return Err(FiqError::ZeroDenominator(format!("{numer}/0")));
        }
        Self::new(BigRational::new(numer.into(), denom.into()))
    }

    /// Builds a propensity from decimal numerator/denominator strings, the
    /// form used by the JSON encoding.
    pub fn from_parts(numer: &str, denom: &str) -> Result<Self, FiqError> {
        let bad = || FiqError::PropensityOutOfRange(format!("{numer}/{denom}"));
        let n: BigInt = numer.trim().parse().map_err(|_| bad())?;
        let d: BigInt = denom.trim().parse().map_err(|_| bad())?;
        if d.is_zero() {
            return Err(FiqError::ZeroDenominator(format!("{numer}/{denom}")));
        }
        Self::new(BigRational::new(n, d))
    }

    pub fn zero() -> Self {
        Propensity(BigRational::zero())
    }

    pub fn one() -> Self {
        Propensity(BigRational::one())
    }

    /// The fully random propensity carried by every tail digit.
    pub fn half() -> Self {
        Propensity(BigRational::new(1.into(), 2.into()))
    }

    pub fn value(&self) -> &BigRational {
        &self.0
    }

    pub fn numer(&self) -> &BigInt {
        self.0.numer()
    }

    pub fn denom(&self) -> &BigInt {
        self.0.denom()
    }

    /// `true` for propensities exactly 0 or 1.
    pub fn is_certain(&self) -> bool {
        self.0.is_zero() || self.0.is_one()
    }

    pub fn is_half(&self) -> bool {
        self.numer().is_one() && self.denom() == &BigInt::from(2)
    }

    /// The propensity of the same digit taking the value 0.
    pub fn complement(&self) -> Self {
        Propensity(BigRational::one() - &self.0)
    }

    /// Numerator and denominator as machine words, when they fit.
    pub fn small_parts(&self) -> Option<(u64, u64)> {
        Some((self.numer().to_u64()?, self.denom().to_u64()?))
    }

    pub fn to_f64(&self) -> f64 {
        ratio::to_f64(&self.0)
    }
}

impl fmt::Debug for Propensity {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Propensity({})", self)
    }
}

impl fmt::Display for Propensity {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&ratio::format_rational(&self.0))
    }
}

impl FromStr for Propensity {
    type Err = ParseError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Ok(Propensity::new(ratio::parse_rational(s)?)?)
    }
}

impl TryFrom<BigRational> for Propensity {
    type Error = FiqError;

    fn try_from(value: BigRational) -> Result<Self, Self::Error> {
        Propensity::new(value)
    }
}

/// Encoded as `["numerator", "denominator"]` with decimal strings so that
/// arbitrarily large values survive JSON unchanged.
impl Serialize for Propensity {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        [self.numer().to_string(), self.denom().to_string()].serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for Propensity {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let [n, d] = <[String; 2]>::deserialize(deserializer)?;
        Propensity::from_parts(&n, &d).map_err(serde::de::Error::custom)
    }
}

fn neg_x_log2_x(x: f64) -> f64 {
    if x <= 0.0 {
        0.0
    } else {
        -x * x.log2()
    }
}

/// Binary entropy `H(q) = -q log2 q - (1-q) log2 (1-q)` with `0 log2 0 = 0`.
///
/// Both `q` and `1 - q` are rounded to `f64` from the exact rational
/// independently, which makes `H(q) == H(1 - q)` hold bit for bit.
pub fn binary_entropy(q: &Propensity) -> f64 {
    let p = q.to_f64();
    let c = q.complement().to_f64();
    neg_x_log2_x(p) + neg_x_log2_x(c)
}

/// Information carried by one digit, `1 - H(q)`.
pub fn digit_information(q: &Propensity) -> f64 {
    1.0 - binary_entropy(q)
}
