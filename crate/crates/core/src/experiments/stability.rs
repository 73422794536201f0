//! Repeated measurements at varying resolution must agree on every digit
//! they have in common.

use rayon::prelude::*;
use serde::Serialize;

use super::{Assertion, Table};
use crate::actualization::{MeasurementEngine, RandomnessSource, Reading};
use crate::fiq::Fiq;

#[derive(Debug, Clone)]
pub struct StabilityParams {
    pub initial: Fiq,
    pub schedule: Vec<usize>,
    pub replicas: u64,
    pub seed: u64,
}

#[derive(Debug, Clone, Serialize)]
pub struct StabilityReport {
    pub measurements: u64,
    pub pair_checks: u64,
    pub violations: u64,
    #[serde(skip)]
    pub readings: Vec<Vec<Reading>>,
}

pub fn measurement_stability_test(p: &StabilityParams) -> StabilityReport {
    let engines: Vec<MeasurementEngine> = p
        .schedule
        .iter()
        .map(|&k| MeasurementEngine::with_resolution(k).expect("positive resolution"))
        .collect();
    let readings: Vec<Vec<Reading>> = (0..p.replicas)
        .into_par_iter()
        .map(|i| {
            let mut rng = RandomnessSource::new(p.seed, i);
            let mut f = p.initial.clone();
            engines
                .iter()
                .map(|e| e.measure(&mut f, &mut rng))
                .collect()
        })
        .collect();

    let mut pair_checks = 0;
    let mut violations = 0;
    for series in &readings {
        for (i, earlier) in series.iter().enumerate() {
            for later in &series[i + 1..] {
                pair_checks += 1;
                violations += u64::from(!later.consistent_with(earlier));
            }
        }
    }
    StabilityReport {
        measurements: p.replicas * p.schedule.len() as u64,
        pair_checks,
        violations,
        readings,
    }
}

impl StabilityReport {
    pub(crate) fn assertions(&self) -> Vec<Assertion> {
        vec![Assertion::equals(
            "prefix-consistency violations",
            self.violations as f64,
            0.0,
        )]
    }

    pub(crate) fn table(&self, schedule: &[usize]) -> Table {
        let mut header = vec!["replica".to_string()];
        header.extend(
            schedule
                .iter()
                .enumerate()
                .map(|(i, k)| format!("reading_{}_k{k}", i + 1)),
        );
        Table {
            header,
            rows: self
                .readings
                .iter()
                .enumerate()
                .map(|(i, series)| {
                    std::iter::once(i.to_string())
                        .chain(series.iter().map(|r| r.to_string()))
                        .collect()
                })
                .collect(),
        }
    }
}
