//! Rival number domains behind one digit interface.
//!
//! Each representation answers "what is the `j`-th binary digit after the
//! radix point?" in its own way: a truncated real stops existing past its
//! cutoff, a rational repeats forever, a computable real runs a program.

mod computable;
mod non_closure;
mod rational;
mod truncated;

pub use computable::{ComputableReal, Generator};
pub use non_closure::{non_closure_demo, ClosureEntry, NonClosureReport};
pub use rational::{ExpansionPeriod, RationalQuantity};
pub use truncated::TruncatedReal;

use std::fmt;
use std::str::FromStr;

use crate::error::{DomainError, ParseError};
use crate::fiq::Fiq;

/// How far a digit source can be read.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Precision {
    Bounded(u64),
    Unbounded,
}

impl Precision {
    pub fn admits(&self, j: u64) -> bool {
        match self {
            Precision::Bounded(n) => j <= *n,
            Precision::Unbounded => true,
        }
    }
}

/// A number in `[0, 1)` that can be read digit by digit.
pub trait DigitSource {
    /// The `j`-th binary digit after the radix point, `j >= 1`.
    fn digit_at(&self, j: u64) -> Result<bool, DomainError>;

    fn known_precision(&self) -> Precision;

    /// Digits `1..=count`.
    fn digits(&self, count: u64) -> Result<Vec<bool>, DomainError> {
        (1..=count).map(|j| self.digit_at(j)).collect()
    }
}

/// Copies the first `take` digits of `src` into the determined prefix of a
/// fresh quantity with an empty window and a random tail.
pub fn to_fiq<S: DigitSource + ?Sized>(src: &S, take: u64) -> Result<Fiq, DomainError> {
    if let Precision::Bounded(n) = src.known_precision() {
        if take > n {
            return Err(DomainError::PrecisionExceeded {
                requested: take,
                cutoff: n,
            });
        }
    }
    Ok(Fiq::determined(src.digits(take)?))
}

pub(crate) fn check_position(j: u64) -> Result<(), DomainError> {
    if j == 0 {
        Err(DomainError::ZeroPosition)
    } else {
        Ok(())
    }
}

/// Any of the exact representations, addressed by the registry notation
/// `rational:p/q`, `truncated:bits:n` or `computable:<name>`.
#[derive(Debug, Clone)]
pub enum ExactDomain {
    Truncated(TruncatedReal),
    Rational(RationalQuantity),
    Computable(ComputableReal),
}

impl DigitSource for ExactDomain {
    fn digit_at(&self, j: u64) -> Result<bool, DomainError> {
        match self {
            ExactDomain::Truncated(t) => t.digit_at(j),
            ExactDomain::Rational(r) => r.digit_at(j),
            ExactDomain::Computable(c) => c.digit_at(j),
        }
    }

    fn known_precision(&self) -> Precision {
        match self {
            ExactDomain::Truncated(t) => t.known_precision(),
            ExactDomain::Rational(r) => r.known_precision(),
            ExactDomain::Computable(c) => c.known_precision(),
        }
    }
}

impl fmt::Display for ExactDomain {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ExactDomain::Truncated(t) => write!(f, "{t}"),
            ExactDomain::Rational(r) => write!(f, "{r}"),
            ExactDomain::Computable(c) => write!(f, "{c}"),
        }
    }
}

impl FromStr for ExactDomain {
    type Err = ParseError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let (kind, rest) = s.split_once(':').ok_or_else(|| ParseError::Unknown {
            kind: "domain",
            input: s.to_string(),
        })?;
        match kind {
            "rational" => Ok(ExactDomain::Rational(rest.parse()?)),
            "truncated" => Ok(ExactDomain::Truncated(rest.parse()?)),
            "computable" => Ok(ExactDomain::Computable(ComputableReal::from_name(rest)?)),
            _ => Err(ParseError::Unknown {
                kind: "domain",
                input: s.to_string(),
            }),
        }
    }
}
