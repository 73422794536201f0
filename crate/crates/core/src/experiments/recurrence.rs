//! Return of a coarse-grained state under the doubling map.
//!
//! A rational initial condition has an eventually periodic expansion, so its
//! `k`-digit coarse state comes back with certainty. A quantity with a random
//! tail has no predetermined orbit; its coarse state matches the initial one
//! only by coincidence, at the chance rate of `2^-k` per step.

use rayon::prelude::*;
use serde::Serialize;

use super::stats::{binomial_band, FrequencyCheck};
use super::{Assertion, Table};
use crate::actualization::{MeasurementEngine, RandomnessSource, Reading};
use crate::domains::{DigitSource, ExpansionPeriod, RationalQuantity};
use crate::dynamics::{evolve_fiq, ShiftMap};
use crate::fiq::Fiq;

#[derive(Debug, Clone, Serialize)]
pub struct RationalRecurrence {
    pub initial_state: String,
    /// First step at which the coarse state equals the initial one.
    pub first_return: Option<u64>,
    pub expansion: Option<ExpansionPeriod>,
    #[serde(skip)]
    pub states: Vec<Reading>,
}

/// Follows `x` for up to `steps` doublings and records the first return of
/// its `k` leading digits.
pub fn rational_recurrence(x: &RationalQuantity, k: usize, steps: u64) -> RationalRecurrence {
    let mut current = x.clone();
    let coarse = |v: &RationalQuantity| Reading(v.digits(k as u64).expect("unbounded"));
    let initial = coarse(&current);
    let mut states = vec![initial.clone()];
    let mut first_return = None;
    for t in 1..=steps {
        current = current.shifted(1).0;
        let state = coarse(&current);
        if first_return.is_none() && state == initial {
            first_return = Some(t);
        }
        states.push(state);
    }
    RationalRecurrence {
        initial_state: initial.to_string(),
        first_return,
        expansion: x.expansion_period(),
        states,
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct FiqRecurrence {
    /// Fraction of replicas whose coarse state returned at least once.
    pub recurrence: FrequencyCheck,
    /// `T * 2^-k`.
    pub chance_baseline: f64,
    /// Mean number of returns per replica; its expectation for a fully
    /// random tail is exactly `T * 2^-k`.
    pub mean_returns: f64,
    #[serde(skip)]
    pub replicas: Vec<FiqReplica>,
}

#[derive(Debug, Clone)]
pub struct FiqReplica {
    pub initial_state: Reading,
    pub returns: u64,
    pub first_return: Option<u64>,
}

/// Evolves `replicas` copies of `initial` for `steps` steps, measuring the
/// `k`-digit coarse state at every step.
pub fn fiq_recurrence(
    initial: &Fiq,
    k: usize,
    steps: u64,
    replicas: u64,
    seed: u64,
    sigmas: f64,
) -> FiqRecurrence {
    let shift = ShiftMap::new(1).expect("nonzero shift");
    let engine = MeasurementEngine::with_resolution(k).expect("positive resolution");
    let runs: Vec<FiqReplica> = (0..replicas)
        .into_par_iter()
        .map(|i| {
            let mut rng = RandomnessSource::new(seed, i);
            let mut f = initial.clone();
            let start = engine.measure(&mut f, &mut rng);
            let mut returns = 0;
            let mut first_return = None;
            for t in 1..=steps {
                evolve_fiq(&mut f, &shift, 1, &mut rng);
                if engine.measure(&mut f, &mut rng) == start {
                    returns += 1;
                    first_return.get_or_insert(t);
                }
            }
            FiqReplica {
                initial_state: start,
                returns,
                first_return,
            }
        })
        .collect();
    let recurred = runs.iter().filter(|r| r.returns > 0).count() as u64;
    let total_returns: u64 = runs.iter().map(|r| r.returns).sum();
    let chance_baseline = steps as f64 * 0.5f64.powi(k as i32);
    FiqRecurrence {
        recurrence: binomial_band(recurred, replicas, chance_baseline, sigmas),
        chance_baseline,
        mean_returns: total_returns as f64 / replicas as f64,
        replicas: runs,
    }
}

/// Either kind of recurrence outcome.
#[derive(Debug, Clone, Serialize)]
#[serde(untagged)]
pub enum RecurrenceReport {
    Rational(RationalRecurrence),
    Fiq(FiqRecurrence),
}

impl RecurrenceReport {
    pub(crate) fn assertions(&self) -> Vec<Assertion> {
        match self {
            RecurrenceReport::Rational(r) => vec![Assertion::flag(
                "coarse state recurs",
                r.first_return.is_some(),
            )],
            RecurrenceReport::Fiq(r) => vec![Assertion::within(
                "recurrence fraction vs chance baseline",
                r.recurrence.frequency,
                r.recurrence.expected,
                r.recurrence.band,
            )],
        }
    }

    pub(crate) fn table(&self) -> Table {
        match self {
            RecurrenceReport::Rational(r) => Table {
                header: vec![
                    "step".into(),
                    "coarse_state".into(),
                    "matches_initial".into(),
                ],
                rows: r
                    .states
                    .iter()
                    .enumerate()
                    .map(|(t, s)| {
                        vec![
                            t.to_string(),
                            s.to_string(),
                            (s.to_string() == r.initial_state).to_string(),
                        ]
                    })
                    .collect(),
            },
            RecurrenceReport::Fiq(r) => Table {
                header: vec![
                    "replica".into(),
                    "initial_state".into(),
                    "returns".into(),
                    "first_return".into(),
                ],
                rows: r
                    .replicas
                    .iter()
                    .enumerate()
                    .map(|(i, rep)| {
                        vec![
                            i.to_string(),
                            rep.initial_state.to_string(),
                            rep.returns.to_string(),
                            rep.first_return.map(|t| t.to_string()).unwrap_or_default(),
                        ]
                    })
                    .collect(),
            },
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    /// Oracle: write the expansion out by long division and find the first
    /// shift whose k-digit window repeats the initial one.
    fn oracle_first_return(n: u64, d: u64, k: usize, steps: usize) -> Option<u64> {
        let mut digits = Vec::new();
        let mut rem = n;
        for _ in 0..steps + k {
            rem *= 2;
            digits.push(rem >= d);
            if rem >= d {
                rem -= d;
            }
        }
        (1..=steps)
            .find(|&t| digits[t..t + k] == digits[..k])
            .map(|t| t as u64)
    }

    #[test]
    fn third_recurs_with_period_two() {
        let r = rational_recurrence(&RationalQuantity::from_ratio(1, 3).unwrap(), 2, 10);
        assert_eq!(r.initial_state, "01");
        assert_eq!(r.first_return, Some(2));
        assert_eq!(r.expansion.unwrap().period, 2);
    }

    #[test]
    fn fifth_recurs_with_period_four() {
        let r = rational_recurrence(&RationalQuantity::from_ratio(1, 5).unwrap(), 4, 10);
        assert_eq!(r.initial_state, "0011");
        assert_eq!(r.first_return, Some(4));
        assert_eq!(oracle_first_return(1, 5, 4, 10), Some(4));
    }

    #[test]
    fn matches_oracle_for_small_denominators() {
        for d in 2..40u64 {
            for n in 0..d {
                let x = RationalQuantity::from_ratio(n, d).unwrap();
                for k in 1..5 {
                    assert_eq!(
                        rational_recurrence(&x, k, 60).first_return,
                        oracle_first_return(n, d, k, 60),
                        "{n}/{d} k={k}"
                    );
                }
            }
        }
    }

    #[test]
    fn random_tail_recurs_at_chance() {
        let r = fiq_recurrence(&Fiq::indeterminate(), 6, 20, 4000, 17, 4.0);
        assert!((r.chance_baseline - 20.0 / 64.0).abs() < 1e-15);
        // mean return count has expectation exactly T 2^-k
        let sd_mean = (r.chance_baseline / 4000.0).sqrt() * 2.0;
        assert!((r.mean_returns - r.chance_baseline).abs() < 4.0 * sd_mean);
    }
}
