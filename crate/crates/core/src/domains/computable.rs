use std::fmt;
use std::sync::RwLock;

use num_bigint::BigUint;
use num_traits::{One, Zero};

use super::{check_position, DigitSource, Precision, RationalQuantity};
use crate::error::DomainError;

/// The vetted digit programs a [`ComputableReal`] can run.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Generator {
    /// `sqrt(2) - 1`
    Sqrt2Minus1,
    /// `pi - 3`
    PiMinus3,
    /// Any rational in `[0, 1)`, through long division.
    Rational(RationalQuantity),
}

impl Generator {
    pub fn name(&self) -> String {
        match self {
            Generator::Sqrt2Minus1 => "sqrt2_minus_1".into(),
            Generator::PiMinus3 => "pi_minus_3".into(),
            Generator::Rational(r) => r.to_string(),
        }
    }

    /// First `count` fractional binary digits.
    fn generate(&self, count: u64) -> Vec<bool> {
        match self {
            Generator::Sqrt2Minus1 => fractional_bits(&sqrt2_scaled(count), count),
            Generator::PiMinus3 => fractional_bits(&pi_scaled(count), count),
            Generator::Rational(r) => r.digits(count).expect("rational digits are unbounded"),
        }
    }
}

/// `floor(2^k * sqrt(2))`.
fn sqrt2_scaled(k: u64) -> BigUint {
    (BigUint::from(2u32) << (2 * k)).sqrt()
}

/// Sum of `floor(S / x^(2n+1) / (2n+1))` over even `n` and odd `n`
/// separately, plus the number of terms. Every term is truncated by less
/// than one unit and the dropped tail is below one unit.
fn arctan_inv_scaled(x: u32, scale: &BigUint) -> (BigUint, BigUint, u64) {
    let x = BigUint::from(x);
    let x2 = &x * &x;
    let mut power = scale / &x;
    let mut plus = BigUint::zero();
    let mut minus = BigUint::zero();
    let mut n = 0u64;
    while !power.is_zero() {
        let term = &power / BigUint::from(2 * n + 1);
        if n % 2 == 0 {
            plus += term;
        } else {
            minus += term;
        }
        power /= &x2;
        n += 1;
    }
    (plus, minus, n)
}

/// `floor(2^k * pi)`, from Machin's formula with enough guard bits that the
/// error interval cannot straddle an integer.
fn pi_scaled(k: u64) -> BigUint {
    let mut guard = 32u64;
    loop {
        let scale = BigUint::one() << (k + guard);
        let (p5, m5, n5) = arctan_inv_scaled(5, &scale);
        let (p239, m239, n239) = arctan_inv_scaled(239, &scale);
        // pi = 16 atan(1/5) - 4 atan(1/239)
        let approx = (p5 * 16u32 + m239 * 4u32) - (m5 * 16u32 + p239 * 4u32);
        let err = BigUint::from(16 * (2 * n5 + 2) + 4 * (2 * n239 + 2));
        let lo = (&approx - &err) >> guard;
        let hi = (&approx + &err) >> guard;
        if lo == hi {
            return lo;
        }
        guard += 32;
    }
}

/// The low `count` bits of `scaled`, most significant first.
fn fractional_bits(scaled: &BigUint, count: u64) -> Vec<bool> {
    (1..=count).map(|j| scaled.bit(count - j)).collect()
}

/// A real number given by a digit-generating program.
///
/// Digits are produced on demand and memoized; the memo only ever grows, so
/// a digit once returned never changes. Concurrent readers are safe.
pub struct ComputableReal {
    generator: Generator,
    memo: RwLock<Vec<bool>>,
}

impl ComputableReal {
    pub fn new(generator: Generator) -> Self {
        ComputableReal {
            generator,
            memo: RwLock::new(Vec::new()),
        }
    }

    /// Looks up a registry name: `sqrt2_minus_1`, `pi_minus_3` or
    /// `rational:p/q`.
    pub fn from_name(name: &str) -> Result<Self, DomainError> {
        let generator = match name {
            "sqrt2_minus_1" => Generator::Sqrt2Minus1,
            "pi_minus_3" => Generator::PiMinus3,
            other => match other.strip_prefix("rational:") {
                Some(r) => Generator::Rational(
                    r.parse()
                        .map_err(|_| DomainError::UnknownGenerator(name.to_string()))?,
                ),
                None => return Err(DomainError::UnknownGenerator(name.to_string())),
            },
        };
        Ok(Self::new(generator))
    }

    pub fn generator(&self) -> &Generator {
        &self.generator
    }

    /// Number of digits currently cached.
    pub fn memoized(&self) -> usize {
        self.memo.read().expect("memo lock poisoned").len()
    }

    fn ensure(&self, count: u64) {
        if (self.memoized() as u64) >= count {
            return;
        }
        let mut memo = self.memo.write().expect("memo lock poisoned");
        let have = memo.len() as u64;
        if have >= count {
            return;
        }
        let target = count.max(2 * have).max(64);
        let fresh = self.generator.generate(target);
        debug_assert_eq!(&fresh[..memo.len()], &memo[..]);
        memo.extend_from_slice(&fresh[have as usize..]);
    }
}

impl DigitSource for ComputableReal {
    fn digit_at(&self, j: u64) -> Result<bool, DomainError> {
        check_position(j)?;
        self.ensure(j);
        Ok(self.memo.read().expect("memo lock poisoned")[(j - 1) as usize])
    }

    fn known_precision(&self) -> Precision {
        Precision::Unbounded
    }

    fn digits(&self, count: u64) -> Result<Vec<bool>, DomainError> {
        self.ensure(count);
        Ok(self.memo.read().expect("memo lock poisoned")[..count as usize].to_vec())
    }
}

impl Clone for ComputableReal {
    fn clone(&self) -> Self {
        ComputableReal {
            generator: self.generator.clone(),
            memo: RwLock::new(self.memo.read().expect("memo lock poisoned").clone()),
        }
    }
}

impl fmt::Debug for ComputableReal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("ComputableReal")
            .field("generator", &self.generator)
            .field("memoized", &self.memoized())
            .finish()
    }
}

impl fmt::Display for ComputableReal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "computable:{}", self.generator.name())
    }
}
