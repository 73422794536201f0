//! Time evolution on `[0, 1)`.
//!
//! [`ShiftMap`] is the chaotic doubling map generalized to `s` digits per
//! step, `x -> 2^s x mod 1`: each step the `s` leading digits leave the
//! quantity and are emitted as the observable output, and every deeper digit
//! moves `s` places toward the radix point. [`RotationMap`] adds a constant
//! mod 1 and serves as the stable, non-chaotic comparison.
//!
//! On a [`Fiq`], a digit that reaches the most significant position under
//! the shift is actualized before it is emitted.

use std::fmt;
use std::num::NonZeroUsize;
use std::str::FromStr;

use num_rational::BigRational;
use serde::Serialize;

use crate::actualization::{actualize_to, MeasurementEngine, RandomBits, SpontaneousEngine};
use crate::domains::{DigitSource, RationalQuantity, TruncatedReal};
use crate::error::{DomainError, DynamicsError, ParseError};
use crate::fiq::Fiq;
use crate::ratio;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ShiftMap {
    shift: NonZeroUsize,
}

impl ShiftMap {
    pub fn new(shift: usize) -> Result<Self, DynamicsError> {
        NonZeroUsize::new(shift)
            .map(|shift| ShiftMap { shift })
            .ok_or(DynamicsError::ZeroShift)
    }

    pub fn shift(&self) -> usize {
        self.shift.get()
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RotationMap {
    alpha: BigRational,
}

impl RotationMap {
    pub fn new(alpha: BigRational) -> Result<Self, DynamicsError> {
        if !ratio::in_unit_interval(&alpha) {
            return Err(DynamicsError::RotationOutOfRange(ratio::format_rational(
                &alpha,
            )));
        }
        Ok(RotationMap { alpha })
    }

    pub fn alpha(&self) -> &BigRational {
        &self.alpha
    }

    /// Number of binary digits in `alpha`, if its expansion terminates.
    pub fn dyadic_bits(&self) -> Option<u64> {
        ratio::dyadic_exponent(&self.alpha)
    }
}

/// A map addressed as `shift:s` or `rotation:p/q`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum MapSpec {
    Shift(ShiftMap),
    Rotation(RotationMap),
}

impl fmt::Display for MapSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            MapSpec::Shift(m) => write!(f, "shift:{}", m.shift()),
            MapSpec::Rotation(m) => write!(f, "rotation:{}", ratio::format_rational(m.alpha())),
        }
    }
}

impl FromStr for MapSpec {
    type Err = ParseError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.split_once(':') {
            Some(("shift", n)) => {
                let n: usize = n.parse().map_err(|_| ParseError::Integer(n.to_string()))?;
                Ok(MapSpec::Shift(ShiftMap::new(n)?))
            }
            Some(("rotation", r)) => Ok(MapSpec::Rotation(RotationMap::new(
                ratio::parse_rational(r)?,
            )?)),
            _ => Err(ParseError::Unknown {
                kind: "map",
                input: s.to_string(),
            }),
        }
    }
}

/// An exact value the deterministic reference evolution can act on.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ExactValue {
    Rational(RationalQuantity),
    Truncated(TruncatedReal),
}

impl ExactValue {
    pub fn value(&self) -> BigRational {
        match self {
            ExactValue::Rational(r) => r.value().clone(),
            ExactValue::Truncated(t) => t.value(),
        }
    }

    /// The `k` leading digits.
    pub fn leading_digits(&self, k: u64) -> Result<Vec<bool>, DomainError> {
        match self {
            ExactValue::Rational(r) => r.digits(k),
            ExactValue::Truncated(t) => t.digits(k),
        }
    }
}

impl fmt::Display for ExactValue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ExactValue::Rational(r) => write!(f, "{r}"),
            ExactValue::Truncated(t) => write!(f, "{t}"),
        }
    }
}

/// Result of [`evolve_exact`]: the final value, every intermediate value
/// (`states[0]` is the input) and the digits emitted by the shift, in order.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ExactTrajectory {
    pub states: Vec<ExactValue>,
    pub emitted: Vec<bool>,
}

impl ExactTrajectory {
    pub fn final_value(&self) -> &ExactValue {
        self.states
            .last()
            .expect("trajectory holds the initial state")
    }
}

/// Deterministic evolution of an exact value, the reference the indeterminate
/// evolution is checked against. Rotations emit no digits.
pub fn evolve_exact(
    x: &ExactValue,
    map: &MapSpec,
    steps: u64,
) -> Result<ExactTrajectory, DynamicsError> {
    if let (ExactValue::Truncated(t), MapSpec::Shift(m)) = (x, map) {
        let needed = m.shift() as u64 * steps;
        if needed > t.cutoff() {
            return Err(DomainError::PrecisionExceeded {
                requested: needed,
                cutoff: t.cutoff(),
            }
            .into());
        }
    }
    let mut states = vec![x.clone()];
    let mut emitted = Vec::new();
    let mut current = x.clone();
    for _ in 0..steps {
        current = match (&current, map) {
            (ExactValue::Rational(r), MapSpec::Shift(m)) => {
                let (next, out) = r.shifted(m.shift() as u64);
                emitted.extend(out);
                ExactValue::Rational(next)
            }
            (ExactValue::Rational(r), MapSpec::Rotation(m)) => {
                ExactValue::Rational(RationalQuantity::wrapping(r.value() + m.alpha()))
            }
            (ExactValue::Truncated(t), MapSpec::Shift(m)) => {
                let s = m.shift();
                let padded = t.padded_bits();
                emitted.extend_from_slice(&padded[..s]);
                ExactValue::Truncated(TruncatedReal::with_cutoff(
                    padded[s..].to_vec(),
                    t.cutoff() - s as u64,
                )?)
            }
            (ExactValue::Truncated(t), MapSpec::Rotation(m)) => {
                let bits = m.dyadic_bits().ok_or_else(|| {
                    DynamicsError::NonDyadicRotation(ratio::format_rational(m.alpha()))
                })?;
                if bits > t.cutoff() {
                    return Err(DomainError::PrecisionExceeded {
                        requested: bits,
                        cutoff: t.cutoff(),
                    }
                    .into());
                }
                let mut padded = t.padded_bits();
                add_dyadic(&mut padded, m.alpha(), bits);
                ExactValue::Truncated(TruncatedReal::with_cutoff(padded, t.cutoff())?)
            }
        };
        states.push(current.clone());
    }
    Ok(ExactTrajectory { states, emitted })
}

/// Adds the dyadic `alpha` (with `bits` digits, `bits <= digits.len()`) to
/// the fixed-width binary fraction `digits`, modulo 1.
fn add_dyadic(digits: &mut [bool], alpha: &BigRational, bits: u64) {
    let alpha_bits = RationalQuantity::wrapping(alpha.clone())
        .digits(bits)
        .expect("rational digits are unbounded");
    let mut carry = false;
    for i in (0..digits.len()).rev() {
        let a = alpha_bits.get(i).copied().unwrap_or(false);
        let sum = u8::from(digits[i]) + u8::from(a) + u8::from(carry);
        digits[i] = sum & 1 == 1;
        carry = sum >= 2;
    }
}

/// Applies the shift map to `f` for `steps` steps and returns the emitted
/// digits (`s * steps` of them). Leading digits that are not yet determined
/// are actualized just before they are emitted.
pub fn evolve_fiq<R: RandomBits + ?Sized>(
    f: &mut Fiq,
    map: &ShiftMap,
    steps: u64,
    rng: &mut R,
) -> Vec<bool> {
    let mut emitted = Vec::with_capacity(map.shift() * steps as usize);
    for _ in 0..steps {
        emitted.extend(shift_step(f, map, rng));
    }
    emitted
}

fn shift_step<R: RandomBits + ?Sized>(f: &mut Fiq, map: &ShiftMap, rng: &mut R) -> Vec<bool> {
    let s = map.shift();
    actualize_to(f, s, rng);
    let out = f.shift_out(s);
    f.tick();
    out
}

/// Applies the rotation `x -> x + alpha mod 1` to `f` for `steps` steps.
///
/// Only dyadic `alpha` is supported. Adding an `a`-digit increment needs the
/// first `a` digits to be determined, so any missing ones are actualized
/// first; after that the addition is exact, no carry arrives from deeper
/// digits, and the window and tail are untouched.
pub fn evolve_fiq_rotation<R: RandomBits + ?Sized>(
    f: &mut Fiq,
    map: &RotationMap,
    steps: u64,
    rng: &mut R,
) -> Result<(), DynamicsError> {
    let bits = map
        .dyadic_bits()
        .ok_or_else(|| DynamicsError::NonDyadicRotation(ratio::format_rational(map.alpha())))?;
    for _ in 0..steps {
        actualize_to(f, bits as usize, rng);
        add_dyadic(f.prefix_mut(), map.alpha(), bits);
        f.tick();
    }
    Ok(())
}

/// Actualization mechanism that runs alongside the map during an evolution.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub enum Engine {
    #[default]
    None,
    Spontaneous(SpontaneousEngine),
    Measurement(MeasurementEngine),
}

impl fmt::Display for Engine {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Engine::None => f.write_str("none"),
            Engine::Spontaneous(e) => write!(f, "spontaneous:{}", ratio::format_rational(e.rate())),
            Engine::Measurement(e) => write!(f, "measurement:{}", e.resolution()),
        }
    }
}

/// Parses `none`, `spontaneous:p/q` or `measurement:k`.
impl FromStr for Engine {
    type Err = ParseError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.split_once(':') {
            None if s == "none" => Ok(Engine::None),
            Some(("spontaneous", rate)) => Ok(Engine::Spontaneous(rate.parse()?)),
            Some(("measurement", k)) => {
                let k: usize = k.parse().map_err(|_| ParseError::Integer(k.to_string()))?;
                MeasurementEngine::with_resolution(k)
                    .map(Engine::Measurement)
                    .ok_or_else(|| ParseError::Malformed {
                        kind: "engine",
                        input: s.to_string(),
                        reason: "resolution must be positive".into(),
                    })
            }
            _ => Err(ParseError::Unknown {
                kind: "engine",
                input: s.to_string(),
            }),
        }
    }
}

/// One row of a trajectory log.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TrajectoryRow {
    pub step: u64,
    pub emitted_bits: String,
    #[serde(rename = "N")]
    pub determined: usize,
    #[serde(rename = "M")]
    pub window_end: usize,
    pub information_content: f64,
}

impl TrajectoryRow {
    fn of(step: u64, emitted: &[bool], f: &Fiq) -> Self {
        TrajectoryRow {
            step,
            emitted_bits: ratio::bits_to_string(emitted),
            determined: f.determined_len(),
            window_end: f.window_end(),
            information_content: f.information_content(),
        }
    }

    pub const CSV_HEADER: &'static str = "step,emitted_bits,N,M,information_content";

    pub fn to_csv(&self) -> String {
        format!(
            "{},{},{},{},{}",
            self.step,
            self.emitted_bits,
            self.determined,
            self.window_end,
            self.information_content
        )
    }
}

/// Evolves `f` under `map` for `steps` steps, applying `engine` after each
/// map step, and logs one row per step (row 0 is the initial state).
pub fn evolve_logged<R: RandomBits + ?Sized>(
    f: &mut Fiq,
    map: &MapSpec,
    engine: &mut Engine,
    steps: u64,
    rng: &mut R,
) -> Result<Vec<TrajectoryRow>, DynamicsError> {
    let mut rows = vec![TrajectoryRow::of(0, &[], f)];
    for step in 1..=steps {
        let emitted = match map {
            MapSpec::Shift(m) => shift_step(f, m, rng),
            MapSpec::Rotation(m) => {
                evolve_fiq_rotation(f, m, 1, rng)?;
                Vec::new()
            }
        };
        match engine {
            Engine::None => {}
            Engine::Spontaneous(e) => {
                e.actualize_due(f, rng);
            }
            Engine::Measurement(e) => {
                e.measure(f, rng);
            }
        }
        rows.push(TrajectoryRow::of(step, &emitted, f));
    }
    Ok(rows)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::actualization::RandomnessSource;
    use crate::domains::to_fiq;
    use crate::propensity::Propensity;

    fn rational(n: u64, d: u64) -> ExactValue {
        ExactValue::Rational(RationalQuantity::from_ratio(n, d).unwrap())
    }

    fn shift(s: usize) -> MapSpec {
        MapSpec::Shift(ShiftMap::new(s).unwrap())
    }

    fn rotation(a: &str) -> MapSpec {
        format!("rotation:{a}").parse().unwrap()
    }

    #[test]
    fn exact_shift_examples() {
        let t = evolve_exact(&rational(11, 16), &shift(1), 1).unwrap();
        assert_eq!(t.final_value(), &rational(3, 8));
        assert_eq!(t.emitted, vec![true]);

        let t = evolve_exact(&rational(1, 3), &shift(1), 2).unwrap();
        assert_eq!(t.final_value(), &rational(1, 3));
        assert_eq!(t.emitted, vec![false, true]);
    }

    #[test]
    fn exact_rotation_period() {
        let t = evolve_exact(&rational(1, 4), &rotation("1/2"), 2).unwrap();
        assert_eq!(t.states[1], rational(3, 4));
        assert_eq!(t.final_value(), &rational(1, 4));
        assert!(t.emitted.is_empty());
    }

    #[test]
    fn truncated_exhaustion() {
        let x = ExactValue::Truncated("101:3".parse().unwrap());
        let t = evolve_exact(&x, &shift(1), 3).unwrap();
        assert_eq!(t.emitted, vec![true, false, true]);
        assert!(matches!(
            evolve_exact(&x, &shift(2), 2),
            Err(DynamicsError::Domain(DomainError::PrecisionExceeded { .. }))
        ));
        let r = evolve_exact(&x, &rotation("1/4"), 1).unwrap();
        assert_eq!(ratio::format_rational(&r.final_value().value()), "7/8");
        assert!(evolve_exact(&x, &rotation("1/16"), 1).is_err());
        assert!(evolve_exact(&x, &rotation("1/3"), 1).is_err());
    }

    #[test]
    fn fiq_shift_of_determined_digits() {
        let mut f = Fiq::determined(vec![true, false, true, true]);
        let mut rng = RandomnessSource::new(0, 0);
        let out = evolve_fiq(&mut f, &ShiftMap::new(1).unwrap(), 1, &mut rng);
        assert_eq!(out, vec![true]);
        assert_eq!(f.prefix(), &[false, true, true]);
        assert_eq!(f.clock(), 1);
        assert_eq!(rng.bits_drawn(), 0);
    }

    #[test]
    fn fiq_shift_moves_window_positionally() {
        let q = Propensity::from_ratio(3, 10).unwrap();
        let mut f = Fiq::new(vec![true, false], [q.clone()], 0).unwrap();
        let mut rng = RandomnessSource::new(0, 0);
        evolve_fiq(&mut f, &ShiftMap::new(1).unwrap(), 1, &mut rng);
        assert_eq!(f.prefix(), &[false]);
        assert_eq!(f.window().front(), Some(&q));
        assert_eq!(f.window_end(), 2);
    }

    #[test]
    fn determinized_third_matches_exact() {
        let third = RationalQuantity::from_ratio(1, 3).unwrap();
        let mut f = to_fiq(&third, 10).unwrap();
        let mut rng = RandomnessSource::new(0, 0);
        let out = evolve_fiq(&mut f, &ShiftMap::new(1).unwrap(), 10, &mut rng);
        assert_eq!(ratio::bits_to_string(&out), "0101010101");
        let exact = evolve_exact(&ExactValue::Rational(third), &shift(1), 10).unwrap();
        assert_eq!(out, exact.emitted);
    }

    #[test]
    fn rotation_on_fiq() {
        let quarter = RotationMap::new(ratio::parse_rational("1/4").unwrap()).unwrap();
        let mut rng = RandomnessSource::new(0, 0);

        let mut f = Fiq::determined(vec![false, true]);
        evolve_fiq_rotation(&mut f, &quarter, 1, &mut rng).unwrap();
        assert_eq!(f.prefix(), &[true, false]);

        let mut f = Fiq::determined(vec![true, true]);
        evolve_fiq_rotation(&mut f, &quarter, 1, &mut rng).unwrap();
        assert_eq!(f.prefix(), &[false, false]);

        let mut f = Fiq::determined(vec![false, true]);
        evolve_fiq_rotation(&mut f, &quarter, 4, &mut rng).unwrap();
        assert_eq!(f.prefix(), &[false, true]);
        assert_eq!(rng.bits_drawn(), 0);

        let third = RotationMap::new(ratio::parse_rational("1/3").unwrap()).unwrap();
        assert!(matches!(
            evolve_fiq_rotation(&mut f, &third, 1, &mut rng),
            Err(DynamicsError::NonDyadicRotation(_))
        ));
    }

    #[test]
    fn rotation_preserves_information() {
        let q = Propensity::from_ratio(1, 3).unwrap();
        let mut f = Fiq::new(vec![true, false, true], [q], 0).unwrap();
        let info = f.information_content();
        let eighth = RotationMap::new(ratio::parse_rational("3/8").unwrap()).unwrap();
        let mut rng = RandomnessSource::new(0, 0);
        for _ in 0..20 {
            evolve_fiq_rotation(&mut f, &eighth, 1, &mut rng).unwrap();
            assert_eq!(f.information_content(), info);
            assert_eq!(f.determined_len(), 3);
        }
    }

    #[test]
    fn short_prefix_actualizes_before_rotation() {
        let eighth = RotationMap::new(ratio::parse_rational("1/8").unwrap()).unwrap();
        let mut f = Fiq::determined(vec![true]);
        let mut rng = RandomnessSource::new(9, 0);
        evolve_fiq_rotation(&mut f, &eighth, 1, &mut rng).unwrap();
        assert_eq!(f.determined_len(), 3);
    }

    #[test]
    fn parse_maps_and_engines() {
        assert_eq!("shift:3".parse::<MapSpec>().unwrap().to_string(), "shift:3");
        assert_eq!(
            "rotation:2/8".parse::<MapSpec>().unwrap().to_string(),
            "rotation:1/4"
        );
        assert!("shift:0".parse::<MapSpec>().is_err());
        assert!("rotation:3/2".parse::<MapSpec>().is_err());
        assert!("baker:1".parse::<MapSpec>().is_err());
        assert_eq!("none".parse::<Engine>().unwrap(), Engine::None);
        assert_eq!(
            "spontaneous:1/2".parse::<Engine>().unwrap().to_string(),
            "spontaneous:1/2"
        );
        assert_eq!(
            "measurement:4".parse::<Engine>().unwrap().to_string(),
            "measurement:4"
        );
        assert!("measurement:0".parse::<Engine>().is_err());
    }

    #[test]
    fn logged_evolution_rows() {
        let mut f = Fiq::determined(vec![true, false]);
        let mut rng = RandomnessSource::new(0, 0);
        let rows = evolve_logged(&mut f, &shift(1), &mut Engine::None, 2, &mut rng).unwrap();
        assert_eq!(rows.len(), 3);
        assert_eq!(rows[1].emitted_bits, "1");
        assert_eq!(rows[2].emitted_bits, "0");
        assert_eq!(rows[0].to_csv(), "0,,2,2,2");
        assert_eq!(rows[2].determined, 0);
    }
}
