//! Fixtures shared by the benchmarks.

use fiq_core::{Fiq, Propensity};

/// A quantity with `prefix` determined digits followed by a window of
/// `window` propensities cycling through 1/10, 3/10, 7/10, 9/10.
pub fn fixture(prefix: usize, window: usize) -> Fiq {
    let qs = [(1, 10), (3, 10), (7, 10), (9, 10)];
    let window = (0..window).map(|i| {
        let (n, d) = qs[i % qs.len()];
        Propensity::from_ratio(n, d).expect("valid propensity")
    });
    Fiq::new((0..prefix).map(|i| i % 3 == 0).collect(), window, 0).expect("valid fiq")
}
