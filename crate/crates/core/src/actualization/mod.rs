//! How indeterminate digits become determinate.
//!
//! Two mechanisms are provided: a [`SpontaneousEngine`] that actualizes
//! digits at a fixed rate as time passes, and a [`MeasurementEngine`] that
//! actualizes exactly the digits a reading of given resolution needs. Both
//! go through [`actualize_next`], which only ever appends to the determined
//! prefix: digits actualize front to back and never change afterwards.

mod rng;
mod sampling;

pub use rng::{Lineage, RandomBits, RandomnessSource, RngBits};
pub use sampling::{sample_digit, sample_fair};

use std::fmt;
use std::num::NonZeroUsize;
use std::str::FromStr;

use num_rational::BigRational;
use num_traits::{Signed, ToPrimitive, Zero};
use serde::Serialize;

use crate::error::ParseError;
use crate::fiq::Fiq;
use crate::ratio;

/// Actualizes digit `N + 1`, sampling it from its window propensity (or 1/2
/// past the window), and appends it to the prefix. Returns the new digit.
pub fn actualize_next<R: RandomBits + ?Sized>(f: &mut Fiq, rng: &mut R) -> bool {
    let bit = match f.next_propensity() {
        Some(q) => sample_digit(q, rng),
        None => sample_fair(rng),
    };
    f.push_actualized(bit);
    bit
}

/// Actualizes digits until at least `depth` are determined.
pub fn actualize_to<R: RandomBits + ?Sized>(f: &mut Fiq, depth: usize, rng: &mut R) {
    while f.determined_len() < depth {
        actualize_next(f, rng);
    }
}

/// Actualization at a configured rate: `rate` digits per step on average,
/// with the fractional part carried from step to step so that the schedule
/// is deterministic. After `T` steps exactly `floor(rate * T)` digits have
/// actualized.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SpontaneousEngine {
    rate: BigRational,
    carry: BigRational,
}

impl SpontaneousEngine {
    pub fn new(rate: BigRational) -> Result<Self, ParseError> {
        if rate.is_negative() {
            return Err(ParseError::Malformed {
                kind: "rate",
                input: ratio::format_rational(&rate),
                reason: "must be nonnegative".into(),
            });
        }
        Ok(SpontaneousEngine {
            rate,
            carry: BigRational::zero(),
        })
    }

    pub fn rate(&self) -> &BigRational {
        &self.rate
    }

    pub fn carry(&self) -> &BigRational {
        &self.carry
    }

    /// One time step: advances the clock and actualizes `floor(rate + carry)`
    /// digits. Returns how many were actualized.
    pub fn step<R: RandomBits + ?Sized>(&mut self, f: &mut Fiq, rng: &mut R) -> u64 {
        let count = self.actualize_due(f, rng);
        f.tick();
        count
    }

    /// Actualizes the digits due in one step without advancing the clock,
    /// for use alongside dynamics that keep time themselves.
    pub fn actualize_due<R: RandomBits + ?Sized>(&mut self, f: &mut Fiq, rng: &mut R) -> u64 {
        let total = &self.carry + &self.rate;
        let whole = total.floor();
        self.carry = total - &whole;
        let count = whole
            .to_integer()
            .to_u64()
            .expect("actualization count fits in u64");
        for _ in 0..count {
            actualize_next(f, rng);
        }
        count
    }
}

impl FromStr for SpontaneousEngine {
    type Err = ParseError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        SpontaneousEngine::new(ratio::parse_rational(s)?)
    }
}

/// Applies one spontaneous step to `f`.
pub fn step_spontaneous<R: RandomBits + ?Sized>(
    f: &mut Fiq,
    engine: &mut SpontaneousEngine,
    rng: &mut R,
) -> u64 {
    engine.step(f, rng)
}

/// A measuring device that reads the `resolution` most significant digits.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct MeasurementEngine {
    resolution: NonZeroUsize,
}

impl MeasurementEngine {
    pub fn new(resolution: NonZeroUsize) -> Self {
        MeasurementEngine { resolution }
    }

    pub fn with_resolution(resolution: usize) -> Option<Self> {
        NonZeroUsize::new(resolution).map(Self::new)
    }

    pub fn resolution(&self) -> usize {
        self.resolution.get()
    }

    /// Determines digits `1..=k` (actualizing any that are not yet) and
    /// returns them. Digits already determined are read, never redrawn, so
    /// repeating a measurement reproduces its reading and a finer one
    /// extends it.
    pub fn measure<R: RandomBits + ?Sized>(&self, f: &mut Fiq, rng: &mut R) -> Reading {
        let k = self.resolution();
        actualize_to(f, k, rng);
        Reading(f.prefix()[..k].to_vec())
    }
}

/// Measures `f` at the engine's resolution.
pub fn measure<R: RandomBits + ?Sized>(
    f: &mut Fiq,
    engine: &MeasurementEngine,
    rng: &mut R,
) -> Reading {
    engine.measure(f, rng)
}

/// The digits returned by a measurement, most significant first.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Reading(pub Vec<bool>);

impl Reading {
    pub fn bits(&self) -> &[bool] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    /// The reading as an integer in `0..2^k`.
    pub fn as_index(&self) -> usize {
        self.0
            .iter()
            .fold(0usize, |acc, &b| (acc << 1) | usize::from(b))
    }

    /// `true` if the two readings agree on their common leading digits.
    pub fn consistent_with(&self, other: &Reading) -> bool {
        let n = self.len().min(other.len());
        self.0[..n] == other.0[..n]
    }
}

impl fmt::Display for Reading {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&ratio::bits_to_string(&self.0))
    }
}

impl Serialize for Reading {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.collect_str(self)
    }
}
