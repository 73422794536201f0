//! A macroscopic average over many indeterminate quantities becomes stable:
//! its variance shrinks as `1 / (12 n)`.

use rayon::prelude::*;
use serde::Serialize;
use statrs::distribution::{ContinuousCDF, Normal};

use super::stats::{ks_one_sample, mean_variance, slope, KsResult};
use super::{Assertion, Table};
use crate::actualization::{MeasurementEngine, RandomnessSource};
use crate::fiq::Fiq;

#[derive(Debug, Clone)]
pub struct EmergenceParams {
    pub particles: Vec<usize>,
    pub replicas: u64,
    pub depth: usize,
    pub seed: u64,
}

#[derive(Debug, Clone, Serialize)]
pub struct VarianceRow {
    pub particles: usize,
    pub mean: f64,
    pub variance: f64,
    pub expected_variance: f64,
    pub relative_error: f64,
    /// Distance of the macro-mean distribution from its reference: uniform
    /// for a single particle, the normal approximation otherwise.
    pub ks: KsResult,
}

#[derive(Debug, Clone, Serialize)]
pub struct EmergenceReport {
    pub rows: Vec<VarianceRow>,
    /// Slope of log(variance) against log(n); -1 for `1/n` scaling.
    pub log_log_slope: f64,
    #[serde(skip)]
    pub means: Vec<Vec<f64>>,
}

/// Actualizes one fully indeterminate quantity to `depth` digits and reads it
/// as a number in `[0, 1)`.
fn particle_value(depth: usize, engine: &MeasurementEngine, rng: &mut RandomnessSource) -> f64 {
    let mut f = Fiq::indeterminate();
    let reading = engine.measure(&mut f, rng);
    reading.as_index() as f64 / (1u64 << depth) as f64
}

pub fn emergence_test(p: &EmergenceParams) -> EmergenceReport {
    assert!(p.depth <= 52, "depth must fit an f64 mantissa");
    let engine = MeasurementEngine::with_resolution(p.depth).expect("positive depth");
    let mut rows = Vec::new();
    let mut means = Vec::new();
    for (block, &n) in p.particles.iter().enumerate() {
        let block_means: Vec<f64> = (0..p.replicas)
            .into_par_iter()
            .map(|r| {
                let mut rng = RandomnessSource::new(p.seed, block as u64 * p.replicas + r);
                let total: f64 = (0..n)
                    .map(|_| particle_value(p.depth, &engine, &mut rng))
                    .sum();
                total / n as f64
            })
            .collect();
        let (mean, variance) = mean_variance(&block_means);
        let expected_variance = 1.0 / (12.0 * n as f64);
        let ks = if n == 1 {
            ks_one_sample(&block_means, |x| x.clamp(0.0, 1.0))
        } else {
            let normal = Normal::new(0.5, expected_variance.sqrt()).expect("positive sd");
            ks_one_sample(&block_means, |x| normal.cdf(x))
        };
        rows.push(VarianceRow {
            particles: n,
            mean,
            variance,
            expected_variance,
            relative_error: (variance - expected_variance).abs() / expected_variance,
            ks,
        });
        means.push(block_means);
    }
    let xs: Vec<f64> = rows.iter().map(|r| (r.particles as f64).ln()).collect();
    let ys: Vec<f64> = rows.iter().map(|r| r.variance.ln()).collect();
    let log_log_slope = if rows.len() >= 2 {
        slope(&xs, &ys)
    } else {
        f64::NAN
    };
    EmergenceReport {
        rows,
        log_log_slope,
        means,
    }
}

impl EmergenceReport {
    pub(crate) fn assertions(&self, tolerance: f64) -> Vec<Assertion> {
        self.rows
            .iter()
            .map(|r| {
                Assertion::within(
                    &format!("variance of macro mean, n={}", r.particles),
                    r.variance,
                    r.expected_variance,
                    tolerance * r.expected_variance,
                )
            })
            .collect()
    }

    pub(crate) fn table(&self) -> Table {
        let mut rows = Vec::new();
        for (row, block) in self.rows.iter().zip(&self.means) {
            for (i, m) in block.iter().enumerate() {
                rows.push(vec![
                    row.particles.to_string(),
                    i.to_string(),
                    m.to_string(),
                ]);
            }
        }
        Table {
            header: vec!["particles".into(), "replica".into(), "macro_mean".into()],
            rows,
        }
    }
}
