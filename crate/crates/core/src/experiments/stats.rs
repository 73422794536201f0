//! Test statistics used by the experiments.

use serde::Serialize;
use statrs::distribution::{ChiSquared, ContinuousCDF};

/// Two-sample chi-square homogeneity test over the same set of cells.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ChiSquareResult {
    pub statistic: f64,
    pub degrees_of_freedom: usize,
    pub p_value: f64,
}

/// Compares two count vectors over the same cells. Cells empty in both
/// samples are dropped. With a single occupied cell the samples cannot
/// differ and the test returns statistic 0, p-value 1.
pub fn chi_square_two_sample(a: &[u64], b: &[u64]) -> ChiSquareResult {
    assert_eq!(a.len(), b.len(), "samples must share cells");
    let na: u64 = a.iter().sum();
    let nb: u64 = b.iter().sum();
    let (na, nb) = (na as f64, nb as f64);
    let (ka, kb) = ((nb / na).sqrt(), (na / nb).sqrt());
    let mut statistic = 0.0;
    let mut cells = 0usize;
    for (&x, &y) in a.iter().zip(b) {
        if x + y == 0 {
            continue;
        }
        cells += 1;
        let d = ka * x as f64 - kb * y as f64;
        statistic += d * d / (x + y) as f64;
    }
    let degrees_of_freedom = cells.saturating_sub(1);
    let p_value = if degrees_of_freedom == 0 {
        1.0
    } else {
        let dist = ChiSquared::new(degrees_of_freedom as f64).expect("positive degrees of freedom");
        dist.sf(statistic)
    };
    ChiSquareResult {
        statistic,
        degrees_of_freedom,
        p_value,
    }
}

/// A binomial frequency together with the band it is checked against.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FrequencyCheck {
    pub successes: u64,
    pub trials: u64,
    pub frequency: f64,
    pub expected: f64,
    pub sigma: f64,
    pub band: f64,
    pub within_band: bool,
}

/// Checks `successes / trials` against `expected` within `sigmas` binomial
/// standard deviations.
pub fn binomial_band(successes: u64, trials: u64, expected: f64, sigmas: f64) -> FrequencyCheck {
    let frequency = successes as f64 / trials as f64;
    let sigma = (expected * (1.0 - expected) / trials as f64).sqrt();
    let band = sigmas * sigma;
    FrequencyCheck {
        successes,
        trials,
        frequency,
        expected,
        sigma,
        band,
        within_band: (frequency - expected).abs() <= band,
    }
}

/// Sample mean and unbiased sample variance.
pub fn mean_variance(xs: &[f64]) -> (f64, f64) {
    let n = xs.len() as f64;
    let mean = xs.iter().sum::<f64>() / n;
    let var = xs.iter().map(|x| (x - mean) * (x - mean)).sum::<f64>() / (n - 1.0);
    (mean, var)
}

/// Least-squares slope of `ys` against `xs`.
pub fn slope(xs: &[f64], ys: &[f64]) -> f64 {
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let sxy: f64 = xs.iter().zip(ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let sxx: f64 = xs.iter().map(|x| (x - mx) * (x - mx)).sum();
    sxy / sxx
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct KsResult {
    pub statistic: f64,
    pub p_value: f64,
}

/// One-sample Kolmogorov-Smirnov test against a continuous CDF, with the
/// asymptotic Kolmogorov p-value.
pub fn ks_one_sample(samples: &[f64], cdf: impl Fn(f64) -> f64) -> KsResult {
    let mut xs = samples.to_vec();
    xs.sort_by(|a, b| a.total_cmp(b));
    let n = xs.len() as f64;
    let statistic = xs
        .iter()
        .enumerate()
        .map(|(i, &x)| {
            let f = cdf(x);
            (f - i as f64 / n).max((i + 1) as f64 / n - f)
        })
        .fold(0.0, f64::max);
    let sqrt_n = n.sqrt();
    let lambda = (sqrt_n + 0.12 + 0.11 / sqrt_n) * statistic;
    KsResult {
        statistic,
        p_value: kolmogorov_survival(lambda),
    }
}

/// `Q(lambda) = 2 sum_{k>=1} (-1)^(k-1) exp(-2 k^2 lambda^2)`.
fn kolmogorov_survival(lambda: f64) -> f64 {
    if lambda < 1e-3 {
        return 1.0;
    }
    let mut sum = 0.0;
    let mut sign = 1.0;
    for k in 1..=100 {
        let k = k as f64;
        let term = sign * (-2.0 * k * k * lambda * lambda).exp();
        sum += term;
        if term.abs() < 1e-12 {
            break;
        }
        sign = -sign;
    }
    (2.0 * sum).clamp(0.0, 1.0)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn identical_samples_score_zero() {
        let r = chi_square_two_sample(&[10, 20, 30, 0], &[10, 20, 30, 0]);
        assert_eq!(r.statistic, 0.0);
        assert_eq!(r.degrees_of_freedom, 2);
        assert!((r.p_value - 1.0).abs() < 1e-12);
    }

    #[test]
    fn single_cell_is_degenerate() {
        let r = chi_square_two_sample(&[0, 50], &[0, 50]);
        assert_eq!(
            (r.statistic, r.degrees_of_freedom, r.p_value),
            (0.0, 0, 1.0)
        );
    }

    #[test]
    fn chi_square_hand_computed() {
        // (30-10)^2/40 + (10-30)^2/40 = 20, df 1: p = erfc(sqrt(10)) = 7.744e-6
        let r = chi_square_two_sample(&[30, 10], &[10, 30]);
        assert!((r.statistic - 20.0).abs() < 1e-12);
        assert!((r.p_value - 7.744_216_431_044_e-6).abs() < 1e-9);
    }

    #[test]
    fn band_arithmetic() {
        let c = binomial_band(30_000, 100_000, 0.3, 4.0);
        assert!((c.sigma - (0.21f64 / 1e5).sqrt()).abs() < 1e-15);
        assert!((c.band - 0.005_796_55).abs() < 1e-7);
        assert!(c.within_band);
        assert!(!binomial_band(31_000, 100_000, 0.3, 4.0).within_band);
    }

    #[test]
    fn moments_and_slope() {
        let (m, v) = mean_variance(&[1.0, 2.0, 3.0, 4.0]);
        assert_eq!(m, 2.5);
        assert!((v - 5.0 / 3.0).abs() < 1e-15);
        assert!((slope(&[0.0, 1.0, 2.0], &[1.0, 3.0, 5.0]) - 2.0).abs() < 1e-15);
    }

    #[test]
    fn ks_against_uniform() {
        let grid: Vec<f64> = (0..1000).map(|i| (i as f64 + 0.5) / 1000.0).collect();
        let r = ks_one_sample(&grid, |x| x.clamp(0.0, 1.0));
        assert!((r.statistic - 0.0005).abs() < 1e-12);
        assert!(r.p_value > 0.99);
        let skewed: Vec<f64> = grid.iter().map(|x| x * x).collect();
        assert!(ks_one_sample(&skewed, |x| x.clamp(0.0, 1.0)).p_value < 1e-6);
    }
}
