//! Finite-information quantities.
//!
//! A [`Fiq`] is a number in `[0, 1)` written in base two whose digits come in
//! three contiguous bands:
//!
//! ```text
//! 0 . d1 d2 ... dN | ?N+1 ... ?M | ?M+1 ?M+2 ...
//!     determined     window        random tail
//! ```
//!
//! Determined digits are plain bits. Window digits carry an exact propensity
//! strictly between 0 and 1. Every digit past `M` has propensity exactly 1/2;
//! the tail is never stored, so a `Fiq` always carries finite information.

use std::collections::VecDeque;
use std::fmt;

use num_rational::BigRational;
use serde::{Deserialize, Serialize};

use crate::error::FiqError;
use crate::propensity::{digit_information, Propensity};
use crate::ratio;

/// Where a digit position sits relative to the `N`/`M` boundaries.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum DigitStatus {
    Determined(bool),
    Windowed(Propensity),
    RandomTail,
}

impl DigitStatus {
    /// The propensity implied by the status: 0 or 1 for determined digits,
    /// 1/2 for the tail.
    pub fn propensity(&self) -> Propensity {
        match self {
            DigitStatus::Determined(true) => Propensity::one(),
            DigitStatus::Determined(false) => Propensity::zero(),
            DigitStatus::Windowed(q) => q.clone(),
            DigitStatus::RandomTail => Propensity::half(),
        }
    }
}

#[derive(Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "FiqDocument", into = "FiqDocument")]
pub struct Fiq {
    prefix: Vec<bool>,
    window: VecDeque<Propensity>,
    clock: u64,
}

impl Fiq {
    /// Builds a quantity, rejecting any window propensity equal to 0 or 1.
    pub fn new(
        prefix: Vec<bool>,
        window: impl IntoIterator<Item = Propensity>,
        clock: u64,
    ) -> Result<Self, FiqError> {
        let window: VecDeque<Propensity> = window.into_iter().collect();
        if let Some((index, q)) = window.iter().enumerate().find(|(_, q)| q.is_certain()) {
            return Err(FiqError::CertainPropensityInWindow {
                index: prefix.len() + index + 1,
                value: q.to_string(),
            });
        }
        Ok(Fiq {
            prefix,
            window,
            clock,
        })
    }

    /// A maximally indeterminate quantity: nothing determined, no window.
    pub fn indeterminate() -> Self {
        Fiq {
            prefix: Vec::new(),
            window: VecDeque::new(),
            clock: 0,
        }
    }

    /// A quantity whose leading digits are `bits` and whose tail is random.
    pub fn determined(bits: Vec<bool>) -> Self {
        Fiq {
            prefix: bits,
            window: VecDeque::new(),
            clock: 0,
        }
    }

    pub fn prefix(&self) -> &[bool] {
        &self.prefix
    }

    pub fn window(&self) -> &VecDeque<Propensity> {
        &self.window
    }

    pub fn clock(&self) -> u64 {
        self.clock
    }

    /// `N(t)`, the number of determined leading digits.
    pub fn determined_len(&self) -> usize {
        self.prefix.len()
    }

    /// `M(t)`, the depth past which every digit is fully random.
    pub fn window_end(&self) -> usize {
        self.prefix.len() + self.window.len()
    }

    /// Status of the `j`-th digit after the radix point.
    ///
    /// # Panics
    ///
    /// Panics if `j == 0`; digit positions start at 1.
    pub fn digit_status(&self, j: u64) -> DigitStatus {
        assert!(j >= 1, "digit positions start at 1");
        let n = self.prefix.len() as u64;
        let m = self.window_end() as u64;
        if j <= n {
            DigitStatus::Determined(self.prefix[(j - 1) as usize])
        } else if j <= m {
            DigitStatus::Windowed(self.window[(j - n - 1) as usize].clone())
        } else {
            DigitStatus::RandomTail
        }
    }

    /// `N + sum over the window of (1 - H(q))`. The tail contributes nothing.
    pub fn information_content(&self) -> f64 {
        self.prefix.len() as f64 + self.window.iter().map(digit_information).sum::<f64>()
    }

    /// The determined prefix read as the dyadic rational `0.d1...dN`.
    pub fn prefix_value(&self) -> BigRational {
        ratio::bits_to_rational(&self.prefix)
    }

    /// Runs the validity report on this quantity.
    pub fn validate(&self) -> ValidityReport {
        validate(&FiqDocument::from(self.clone()), None)
    }

    /// Appends an actualized digit. Consumes the front of the window if any.
    pub(crate) fn push_actualized(&mut self, bit: bool) {
        self.window.pop_front();
        self.prefix.push(bit);
    }

    /// Propensity of digit `N + 1`, the next one to actualize.
    pub(crate) fn next_propensity(&self) -> Option<&Propensity> {
        self.window.front()
    }

    /// Removes and returns the `s` leading determined digits, moving every
    /// deeper digit `s` positions toward the radix point.
    pub(crate) fn shift_out(&mut self, s: usize) -> Vec<bool> {
        debug_assert!(s <= self.prefix.len());
        self.prefix.drain(..s).collect()
    }

    pub(crate) fn prefix_mut(&mut self) -> &mut Vec<bool> {
        &mut self.prefix
    }

    pub(crate) fn tick(&mut self) {
        self.clock += 1;
    }
}

impl fmt::Debug for Fiq {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Fiq(0.{}", ratio::bits_to_string(&self.prefix))?;
        if !self.window.is_empty() {
            let w: Vec<String> = self.window.iter().map(|q| q.to_string()).collect();
            write!(f, "[{}]", w.join(" "))?;
        }
        write!(f, "..., t={})", self.clock)
    }
}

/// The on-disk form of a [`Fiq`]:
/// `{"prefix": "1011", "window": [["3","10"], ...], "clock": 0}`.
///
/// Also used as the unchecked candidate accepted by [`validate`].
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FiqDocument {
    pub prefix: String,
    pub window: Vec<[String; 2]>,
    pub clock: u64,
}

impl From<Fiq> for FiqDocument {
    fn from(f: Fiq) -> Self {
        FiqDocument {
            prefix: ratio::bits_to_string(&f.prefix),
            window: f
                .window
                .iter()
                .map(|q| [q.numer().to_string(), q.denom().to_string()])
                .collect(),
            clock: f.clock,
        }
    }
}

impl TryFrom<FiqDocument> for Fiq {
    type Error = FiqError;

    fn try_from(doc: FiqDocument) -> Result<Self, Self::Error> {
        let prefix = parse_bits(&doc.prefix)?;
        let window = doc
            .window
            .iter()
            .map(|[n, d]| Propensity::from_parts(n, d))
            .collect::<Result<Vec<_>, _>>()?;
        Fiq::new(prefix, window, doc.clock)
    }
}

/// Parses a `'0'`/`'1'` string.
pub fn parse_bits(s: &str) -> Result<Vec<bool>, FiqError> {
    s.chars()
        .map(|c| match c {
            '0' => Ok(false),
            '1' => Ok(true),
            other => Err(FiqError::InvalidBit(other)),
        })
        .collect()
}

/// A point in the history of one quantity: its clock and every digit it has
/// ever determined, including digits already shifted out by the dynamics.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Snapshot {
    pub clock: u64,
    pub realized: String,
}

impl Snapshot {
    pub fn new(clock: u64, realized: &[bool]) -> Self {
        Snapshot {
            clock,
            realized: ratio::bits_to_string(realized),
        }
    }
}

pub const CHECK_PREFIX_BITS: &str = "prefix digits are 0 or 1";
pub const CHECK_PROPENSITY_RANGE: &str = "propensities lie in [0, 1]";
pub const CHECK_WINDOW_OPEN: &str = "window must exclude certain propensities";
pub const CHECK_FINITE_INFORMATION: &str = "information content is finite";
pub const CHECK_MONOTONE_HISTORY: &str = "history is monotone and irreversible";

/// Outcome of one invariant check.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Check {
    pub invariant: &'static str,
    pub passed: bool,
    pub violations: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ValidityReport {
    pub checks: Vec<Check>,
    pub information_content: Option<f64>,
}

impl ValidityReport {
    pub fn is_valid(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }

    /// Names of the invariants that failed.
    pub fn violated(&self) -> Vec<&'static str> {
        self.checks
            .iter()
            .filter(|c| !c.passed)
            .map(|c| c.invariant)
            .collect()
    }
}

fn check(invariant: &'static str, violations: Vec<String>) -> Check {
    Check {
        invariant,
        passed: violations.is_empty(),
        violations,
    }
}

/// Checks an arbitrary candidate against every `Fiq` invariant and reports
/// each one separately. Never fails; malformed input shows up as violations.
///
/// When `history` is given, it must have nondecreasing clocks and each
/// snapshot's realized digits must extend the previous snapshot's.
pub fn validate(candidate: &FiqDocument, history: Option<&[Snapshot]>) -> ValidityReport {
    let mut checks = Vec::new();

    let bad_bits: Vec<String> = candidate
        .prefix
        .chars()
        .enumerate()
        .filter(|(_, c)| *c != '0' && *c != '1')
        .map(|(i, c)| format!("digit {} is {c:?}", i + 1))
        .collect();
    checks.push(check(CHECK_PREFIX_BITS, bad_bits));

    let n = candidate.prefix.chars().count();
    let mut range = Vec::new();
    let mut certain = Vec::new();
    let mut parsed = Vec::new();
    for (i, [num, den]) in candidate.window.iter().enumerate() {
        let pos = n + i + 1;
        match Propensity::from_parts(num, den) {
            Ok(q) => {
                if q.is_certain() {
                    certain.push(format!("digit {pos} has propensity {q}"));
                }
                parsed.push(q);
            }
            Err(e) => range.push(format!("digit {pos}: {e}")),
        }
    }
    checks.push(check(CHECK_PROPENSITY_RANGE, range));
    checks.push(check(CHECK_WINDOW_OPEN, certain));

    let info = n as f64 + parsed.iter().map(digit_information).sum::<f64>();
    let finite = if info.is_finite() {
        Vec::new()
    } else {
        vec![format!("information content evaluates to {info}")]
    };
    checks.push(check(CHECK_FINITE_INFORMATION, finite));

    if let Some(history) = history {
        let mut violations = Vec::new();
        for (i, pair) in history.windows(2).enumerate() {
            let (a, b) = (&pair[0], &pair[1]);
            if b.clock < a.clock {
                violations.push(format!(
                    "snapshot {} clock {} precedes snapshot {} clock {}",
                    i + 1,
                    b.clock,
                    i,
                    a.clock
                ));
            }
            if !b.realized.starts_with(&a.realized) {
                violations.push(format!(
                    "snapshot {} realized {:?} does not extend {:?}",
                    i + 1,
                    b.realized,
                    a.realized
                ));
            }
        }
        checks.push(check(CHECK_MONOTONE_HISTORY, violations));
    }

    let valid_structure = checks
        .iter()
        .all(|c| c.passed || c.invariant == CHECK_MONOTONE_HISTORY);
    ValidityReport {
        checks,
        information_content: valid_structure.then_some(info),
    }
}
