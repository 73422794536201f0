//! Do quantities with a random tail and quantities whose every digit was
//! fixed in advance produce the same observations under the shift map?
//!
//! Ensemble A evolves a [`Fiq`] and lets digits actualize as they surface.
//! Ensemble B draws all digits it will ever need up front, from the same
//! propensities, builds the exact rational with that expansion and evolves
//! it deterministically. Both read the `k` leading digits after `T` steps.

use rayon::prelude::*;
use serde::Serialize;

use super::stats::{binomial_band, chi_square_two_sample, ChiSquareResult, FrequencyCheck};
use super::{Assertion, Table};
use crate::actualization::{
    measure, sample_digit, sample_fair, MeasurementEngine, RandomnessSource, Reading,
};
use crate::domains::RationalQuantity;
use crate::dynamics::{evolve_exact, evolve_fiq, ExactValue, MapSpec, ShiftMap};
use crate::fiq::{DigitStatus, Fiq};
use crate::ratio;

#[derive(Debug, Clone)]
pub struct IndistinguishabilityParams {
    pub initial: Fiq,
    pub resolution: usize,
    pub replicas: u64,
    pub steps: u64,
    /// Ensemble B reuses ensemble A's random streams.
    pub matched: bool,
    pub seed: u64,
}

#[derive(Debug, Clone, Serialize)]
pub struct IndistinguishabilityReport {
    pub counts_fiq: Vec<u64>,
    pub counts_hidden: Vec<u64>,
    pub chi_square: ChiSquareResult,
    /// Fewer than 5 expected counts per cell.
    pub underpowered: bool,
    /// Frequency of a leading 1 in each ensemble's readings, against the
    /// propensity of the digit that surfaces there.
    pub leading_fiq: FrequencyCheck,
    pub leading_hidden: FrequencyCheck,
    pub identical_replicas: u64,
    #[serde(skip)]
    pub readings: Vec<(Reading, Reading)>,
}

/// Ensemble A: evolve the quantity itself.
fn fiq_replica(p: &IndistinguishabilityParams, rng: &mut RandomnessSource) -> Reading {
    let mut f = p.initial.clone();
    let shift = ShiftMap::new(1).expect("nonzero shift");
    evolve_fiq(&mut f, &shift, p.steps, rng);
    let engine = MeasurementEngine::with_resolution(p.resolution).expect("positive resolution");
    measure(&mut f, &engine, rng)
}

/// Ensemble B: complete the expansion ahead of time, then evolve exactly.
fn hidden_variable_replica(p: &IndistinguishabilityParams, rng: &mut RandomnessSource) -> Reading {
    let depth = p.steps + p.resolution as u64;
    let digits: Vec<bool> = (1..=depth)
        .map(|j| match p.initial.digit_status(j) {
            DigitStatus::Determined(b) => b,
            DigitStatus::Windowed(q) => sample_digit(&q, rng),
            DigitStatus::RandomTail => sample_fair(rng),
        })
        .collect();
    let x = RationalQuantity::new(ratio::bits_to_rational(&digits)).expect("dyadic in [0, 1)");
    let map = MapSpec::Shift(ShiftMap::new(1).expect("nonzero shift"));
    let traj = evolve_exact(&ExactValue::Rational(x), &map, p.steps).expect("rational shift");
    Reading(
        traj.final_value()
            .leading_digits(p.resolution as u64)
            .expect("rational digits are unbounded"),
    )
}

pub fn indistinguishability_test(
    p: &IndistinguishabilityParams,
    sigmas: f64,
) -> IndistinguishabilityReport {
    let cells = 1usize << p.resolution;
    let readings: Vec<(Reading, Reading)> = (0..p.replicas)
        .into_par_iter()
        .map(|i| {
            let a = fiq_replica(p, &mut RandomnessSource::new(p.seed, i));
            let stream_b = if p.matched { i } else { p.replicas + i };
            let b = hidden_variable_replica(p, &mut RandomnessSource::new(p.seed, stream_b));
            (a, b)
        })
        .collect();

    let mut counts_fiq = vec![0u64; cells];
    let mut counts_hidden = vec![0u64; cells];
    let mut identical_replicas = 0;
    let (mut ones_a, mut ones_b) = (0, 0);
    for (a, b) in &readings {
        counts_fiq[a.as_index()] += 1;
        counts_hidden[b.as_index()] += 1;
        identical_replicas += u64::from(a == b);
        ones_a += u64::from(a.bits()[0]);
        ones_b += u64::from(b.bits()[0]);
    }
    let q = p.initial.digit_status(p.steps + 1).propensity().to_f64();
    IndistinguishabilityReport {
        chi_square: chi_square_two_sample(&counts_fiq, &counts_hidden),
        underpowered: p.replicas < 5 * cells as u64,
        leading_fiq: binomial_band(ones_a, p.replicas, q, sigmas),
        leading_hidden: binomial_band(ones_b, p.replicas, q, sigmas),
        counts_fiq,
        counts_hidden,
        identical_replicas,
        readings,
    }
}

impl IndistinguishabilityReport {
    pub(crate) fn assertions(&self, p: &IndistinguishabilityParams, p_min: f64) -> Vec<Assertion> {
        let mut out = vec![Assertion::at_least(
            "chi-square p-value between ensembles",
            self.chi_square.p_value,
            p_min,
        )];
        if p.matched {
            out.push(Assertion::equals(
                "seed-matched replicas identical",
                self.identical_replicas as f64,
                p.replicas as f64,
            ));
        }
        out
    }

    pub(crate) fn table(&self) -> Table {
        Table {
            header: vec![
                "replica".into(),
                "reading_fiq".into(),
                "reading_hidden".into(),
            ],
            rows: self
                .readings
                .iter()
                .enumerate()
                .map(|(i, (a, b))| vec![i.to_string(), a.to_string(), b.to_string()])
                .collect(),
        }
    }
}
