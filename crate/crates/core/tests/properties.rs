mod common;

use std::collections::HashSet;

use num_bigint::BigInt;
use num_rational::BigRational;
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha20Rng;

use common::{cycle_of, information_oracle, long_division, random_fiq, random_open_propensity};
use fiq_core::actualization::sample_fair;
use fiq_core::{
    binary_entropy, evolve_exact, evolve_fiq, sample_digit, to_fiq, validate, DigitSource,
    DigitStatus, ExactValue, Fiq, FiqDocument, MapSpec, MeasurementEngine, Propensity, RandomBits,
    RandomnessSource, RationalQuantity, ShiftMap,
};

fn shift(s: usize) -> ShiftMap {
    ShiftMap::new(s).unwrap()
}

#[test]
fn entropy_is_exactly_symmetric() {
    let mut rng = ChaCha20Rng::seed_from_u64(1);
    for _ in 0..1000 {
        let q = random_open_propensity(&mut rng, 1 << 40);
        assert_eq!(binary_entropy(&q), binary_entropy(&q.complement()), "{q}");
    }
}

#[test]
fn information_matches_fixed_point_oracle() {
    let mut rng = ChaCha20Rng::seed_from_u64(2);
    for _ in 0..300 {
        let f = random_fiq(&mut rng, 40, 40);
        let (got, want) = (f.information_content(), information_oracle(&f));
        assert!((got - want).abs() < 1e-12, "{got} vs {want}");
    }
}

#[test]
fn oracle_reproduces_known_values() {
    // 1 - H(1/4) = 0.18872187554086717
    let f = Fiq::new(vec![], [Propensity::from_ratio(1, 4).unwrap()], 0).unwrap();
    assert!((information_oracle(&f) - 0.188_721_875_540_867_17).abs() < 1e-16);
    let half = Fiq::new(vec![true], [Propensity::half()], 0).unwrap();
    assert_eq!(information_oracle(&half), 1.0);
}

#[test]
fn certain_propensities_never_enter_a_window() {
    for q in [Propensity::zero(), Propensity::one()] {
        assert!(Fiq::new(vec![], [q.clone()], 0).is_err());
        let doc = FiqDocument {
            prefix: "1".into(),
            window: vec![[q.numer().to_string(), q.denom().to_string()]],
            clock: 0,
        };
        let report = validate(&doc, None);
        assert!(!report.is_valid());
        assert!(report.information_content.is_none());
    }
}

#[test]
fn rational_period_matches_cycle_detection() {
    for d in 1..1000u64 {
        for n in [0, 1, d / 3, d / 2, d - 1] {
            if n >= d || num_integer::gcd(n, d) != 1 && n != 0 {
                continue;
            }
            let x = RationalQuantity::from_ratio(n, d).unwrap();
            let p = x.expansion_period().unwrap();
            let (mu, lambda) = cycle_of(n, if n == 0 { 1 } else { d });
            assert_eq!((p.preperiod, p.period), (mu, lambda), "{n}/{d}");
        }
    }
}

#[test]
fn exhaustive_shift_matches_exact_evolution() {
    let map = MapSpec::Shift(shift(1));
    for pattern in 0u32..1 << 10 {
        let bits: Vec<bool> = (0..10).rev().map(|i| pattern >> i & 1 == 1).collect();
        let mut f = Fiq::determined(bits.clone());
        let mut rng = RandomnessSource::new(0, 0);
        let emitted = evolve_fiq(&mut f, &shift(1), 10, &mut rng);
        let x = RationalQuantity::from_ratio(u64::from(pattern), 1024).unwrap();
        let exact = evolve_exact(&ExactValue::Rational(x), &map, 10).unwrap();
        assert_eq!(emitted, exact.emitted);
        assert_eq!(emitted, bits);
        assert_eq!(rng.bits_drawn(), 0);
    }
}

#[test]
fn pure_states_diverge() {
    let start = Fiq::determined(vec![true, false, true]);
    let engine = MeasurementEngine::with_resolution(23).unwrap();
    let mut identical = 0;
    for pair in 0..1000u64 {
        let mut a = start.clone();
        let mut b = start.clone();
        let ra = engine.measure(&mut a, &mut RandomnessSource::new(4, 2 * pair));
        let rb = engine.measure(&mut b, &mut RandomnessSource::new(4, 2 * pair + 1));
        assert_eq!(ra.bits()[..3], rb.bits()[..3]);
        identical += u32::from(ra.bits()[3..] == rb.bits()[3..]);
    }
    // chance agreement on 20 fresh bits is 2^-20 per pair
    assert!(f64::from(identical) / 1000.0 < 1e-3);
}

#[test]
fn streams_are_reproducible_and_distinct() {
    let draw = |seed, stream| {
        let mut r = RandomnessSource::new(seed, stream);
        (0..256).map(|_| r.next_bit()).collect::<Vec<_>>()
    };
    assert_eq!(draw(7, 3), draw(7, 3));
    let distinct: HashSet<_> = (0..50).map(|s| draw(7, s)).collect();
    assert_eq!(distinct.len(), 50);
    assert_ne!(draw(7, 0), draw(8, 0));
}

#[test]
fn resumed_source_continues_the_stream() {
    let mut a = RandomnessSource::new(11, 5);
    let skip: usize = 200;
    for _ in 0..skip {
        a.next_bit();
    }
    let mut b = RandomnessSource::resume(a.lineage());
    let tail_a: Vec<bool> = (0..300).map(|_| a.next_bit()).collect();
    let tail_b: Vec<bool> = (0..300).map(|_| b.next_bit()).collect();
    assert_eq!(tail_a, tail_b);
}

#[test]
fn sampling_frequency_calibrates() {
    let mut rng = RandomnessSource::new(21, 0);
    for (n, d) in [(1, 3), (5, 8), (2, 7)] {
        let q = Propensity::from_ratio(n, d).unwrap();
        let draws = 40_000;
        let ones = (0..draws).filter(|_| sample_digit(&q, &mut rng)).count();
        let p = n as f64 / d as f64;
        let sigma = (p * (1.0 - p) / draws as f64).sqrt();
        assert!((ones as f64 / draws as f64 - p).abs() < 4.0 * sigma, "{q}");
    }
    let fair = (0..40_000).filter(|_| sample_fair(&mut rng)).count();
    assert!((fair as f64 / 40_000.0 - 0.5).abs() < 4.0 * 0.0025);
}

#[test]
fn sampling_uses_two_bits_on_average() {
    let mut rng = RandomnessSource::new(22, 0);
    let q = Propensity::from_ratio(3, 10).unwrap();
    for _ in 0..10_000 {
        sample_digit(&q, &mut rng);
    }
    let mean = rng.bits_drawn() as f64 / 10_000.0;
    assert!((mean - 2.0).abs() < 0.1, "{mean}");
}

fn arb_fiq() -> impl Strategy<Value = Fiq> {
    (
        prop::collection::vec(any::<bool>(), 0..24),
        prop::collection::vec((2u64..200).prop_flat_map(|d| (1..d, Just(d))), 0..24),
        0u64..10,
    )
        .prop_map(|(prefix, window, clock)| {
            let window: Vec<_> = window
                .into_iter()
                .map(|(n, d)| Propensity::from_ratio(n, d).unwrap())
                .collect();
            Fiq::new(prefix, window, clock).unwrap()
        })
}

proptest! {
    #[test]
    fn digit_status_partitions_positions(f in arb_fiq()) {
        let (n, m) = (f.determined_len() as u64, f.window_end() as u64);
        for j in 1..=m + 5 {
            let status = f.digit_status(j);
            match status {
                DigitStatus::Determined(b) => {
                    prop_assert!(j <= n);
                    prop_assert_eq!(b, f.prefix()[(j - 1) as usize]);
                }
                DigitStatus::Windowed(q) => {
                    prop_assert!(j > n && j <= m);
                    prop_assert!(!q.is_certain());
                }
                DigitStatus::RandomTail => prop_assert!(j > m),
            }
        }
    }

    #[test]
    fn document_round_trip(f in arb_fiq()) {
        let doc = FiqDocument::from(f.clone());
        let report = validate(&doc, None);
        prop_assert!(report.is_valid());
        prop_assert_eq!(report.information_content, Some(f.information_content()));
        prop_assert_eq!(Fiq::try_from(doc).unwrap(), f);
    }

    #[test]
    fn shift_composes(f in arb_fiq(), a in 1usize..5, b in 1usize..5, seed in any::<u64>()) {
        let mut once = f.clone();
        let mut twice = f.clone();
        let e1 = evolve_fiq(&mut once, &shift(a + b), 1, &mut RandomnessSource::new(seed, 0));
        let mut rng = RandomnessSource::new(seed, 0);
        let mut e2 = evolve_fiq(&mut twice, &shift(a), 1, &mut rng);
        e2.extend(evolve_fiq(&mut twice, &shift(b), 1, &mut rng));
        prop_assert_eq!(e1.len(), a + b);
        prop_assert_eq!(&e1, &e2);
        prop_assert_eq!(once.prefix(), twice.prefix());
        prop_assert_eq!(once.window(), twice.window());
        prop_assert_eq!(once.clock() + 1, twice.clock());
    }

    #[test]
    fn shift_drops_information(f in arb_fiq(), s in 1usize..4, seed in any::<u64>()) {
        let before = f.information_content();
        let mut g = f.clone();
        evolve_fiq(&mut g, &shift(s), 1, &mut RandomnessSource::new(seed, 0));
        prop_assert!(g.information_content() <= before + 1e-12);
        // a fully determined prefix loses exactly s bits
        if f.determined_len() >= s {
            let lost: f64 = before - g.information_content();
            prop_assert!((lost - s as f64).abs() < 1e-9);
        }
    }

    #[test]
    fn to_fiq_freezes_leading_digits(n in 0u64..997, take in 0u64..40) {
        let x = RationalQuantity::from_ratio(n, 997).unwrap();
        let f = to_fiq(&x, take).unwrap();
        prop_assert_eq!(f.prefix(), &long_division(n, 997, take as usize)[..]);
        prop_assert_eq!(f.prefix(), &x.digits(take).unwrap()[..]);
        prop_assert!(f.window().is_empty());
    }

    #[test]
    fn measurement_extends_prefix(f in arb_fiq(), k in 1usize..40, seed in any::<u64>()) {
        let mut g = f.clone();
        let reading = MeasurementEngine::with_resolution(k).unwrap()
            .measure(&mut g, &mut RandomnessSource::new(seed, 0));
        prop_assert_eq!(reading.len(), k);
        let common = f.determined_len().min(k);
        prop_assert_eq!(&reading.bits()[..common], &f.prefix()[..common]);
        prop_assert!(g.prefix().starts_with(f.prefix()));
        prop_assert!(g.determined_len() >= k);
    }

    #[test]
    fn big_rationals_sample_exactly(
        n in 1u64.., extra in 1u64..u64::MAX, seed in any::<u64>()
    ) {
        // the u128 and BigUint paths must agree with direct comparison of
        // the drawn bits against the expansion
        let q = BigRational::new(BigInt::from(n) * BigInt::from(u64::MAX), BigInt::from(n) * BigInt::from(u64::MAX) + BigInt::from(extra));
        let q = Propensity::new(q).unwrap();
        let mut rng = RandomnessSource::new(seed, 0);
        let mut replay = RandomnessSource::new(seed, 0);
        let bit = sample_digit(&q, &mut rng);
        let drawn = rng.bits_drawn();
        let u: Vec<bool> = (0..drawn).map(|_| replay.next_bit()).collect();
        let ubits = fiq_core::ratio::bits_to_rational(&u);
        // U lies in [ubits, ubits + 2^-drawn), entirely on one side of q
        let width = BigRational::new(BigInt::from(1), BigInt::from(1) << drawn as usize);
        if bit {
            prop_assert!(ubits.clone() + width <= *q.value());
        } else {
            prop_assert!(ubits >= *q.value());
        }
    }
}

#[test]
fn random_tail_bits_are_fair_across_replicas() {
    let mut rng = ChaCha20Rng::seed_from_u64(3);
    let replicas = 4000u64;
    let ones = (0..replicas)
        .filter(|&r| {
            let mut f = Fiq::indeterminate();
            let mut src = RandomnessSource::new(rng.gen(), r);
            evolve_fiq(&mut f, &shift(1), 1, &mut src)[0]
        })
        .count();
    assert!((ones as f64 / replicas as f64 - 0.5).abs() < 4.0 * (0.25 / replicas as f64).sqrt());
}
