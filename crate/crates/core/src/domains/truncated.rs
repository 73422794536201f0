use std::fmt;
use std::str::FromStr;

use num_rational::BigRational;

use super::{check_position, DigitSource, Precision};
use crate::error::{DomainError, ParseError};
use crate::fiq::parse_bits;
use crate::ratio;

/// A real number cut off after `n` binary digits.
///
/// Digits past `n` do not exist: asking for one is an error rather than a
/// zero. Stored bits shorter than `n` are padded with zeros.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TruncatedReal {
    bits: Vec<bool>,
    cutoff: u64,
}

impl TruncatedReal {
    pub fn new(bits: Vec<bool>, cutoff: u64) -> Result<Self, DomainError> {
        if cutoff == 0 {
            return Err(DomainError::ZeroCutoff);
        }
        Self::with_cutoff(bits, cutoff)
    }

    /// Like [`TruncatedReal::new`] but admits a zero cutoff, which is what
    /// remains after a shift consumes every digit.
    pub(crate) fn with_cutoff(bits: Vec<bool>, cutoff: u64) -> Result<Self, DomainError> {
        if bits.len() as u64 > cutoff {
            return Err(DomainError::TooManyBits {
                len: bits.len(),
                cutoff,
            });
        }
        Ok(TruncatedReal { bits, cutoff })
    }

    pub fn bits(&self) -> &[bool] {
        &self.bits
    }

    pub fn cutoff(&self) -> u64 {
        self.cutoff
    }

    /// The exact dyadic value `0.b1...bk`.
    pub fn value(&self) -> BigRational {
        ratio::bits_to_rational(&self.bits)
    }

    /// All `n` digits, including zero padding.
    pub fn padded_bits(&self) -> Vec<bool> {
        let mut out = self.bits.clone();
        out.resize(self.cutoff as usize, false);
        out
    }
}

impl DigitSource for TruncatedReal {
    fn digit_at(&self, j: u64) -> Result<bool, DomainError> {
        check_position(j)?;
        if j > self.cutoff {
            return Err(DomainError::PrecisionExceeded {
                requested: j,
                cutoff: self.cutoff,
            });
        }
        Ok(self.bits.get((j - 1) as usize).copied().unwrap_or(false))
    }

    fn known_precision(&self) -> Precision {
        Precision::Bounded(self.cutoff)
    }
}

impl fmt::Display for TruncatedReal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "truncated:{}:{}",
            ratio::bits_to_string(&self.bits),
            self.cutoff
        )
    }
}

/// Parses `bits:n`, e.g. `101:3`.
impl FromStr for TruncatedReal {
    type Err = ParseError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let malformed = |reason: &str| ParseError::Malformed {
            kind: "truncated real",
            input: s.to_string(),
            reason: reason.to_string(),
        };
        let (bits, n) = s
            .split_once(':')
            .ok_or_else(|| malformed("expected bits:n"))?;
        let cutoff: u64 = n.parse().map_err(|_| ParseError::Integer(n.to_string()))?;
        Ok(TruncatedReal::new(parse_bits(bits)?, cutoff)?)
    }
}
