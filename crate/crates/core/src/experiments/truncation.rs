//! Which digits a change of units pushes past a truncation cutoff.

use num_rational::BigRational;
use num_traits::{Signed, Zero};
use serde::Serialize;

use super::Table;
use crate::domains::{DigitSource, RationalQuantity, TruncatedReal};
use crate::ratio;

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case", tag = "kind", content = "positions")]
pub enum LostDigits {
    None,
    /// Nonzero digits past the cutoff, by position.
    Finite(Vec<u64>),
    /// The rescaled expansion never terminates.
    Infinite,
}

#[derive(Debug, Clone, Serialize)]
pub struct TruncationReport {
    pub original: String,
    pub cutoff: u64,
    pub scale: String,
    pub rescaled: String,
    pub integer_part: String,
    /// Digits the rescaled fraction needs; `None` if it never terminates.
    pub digits_needed: Option<u64>,
    pub representable: String,
    pub lost: LostDigits,
    pub lossless: bool,
}

/// How many digits past the cutoff the table shows for non-terminating
/// expansions.
const SHOWN_PAST_CUTOFF: u64 = 16;

pub fn truncation_unit_dependence_demo(
    q: &TruncatedReal,
    scale: &BigRational,
) -> Result<TruncationReport, crate::error::DomainError> {
    if scale.is_negative() || scale.is_zero() {
        return Err(crate::error::DomainError::NegativeLength(
            ratio::format_rational(scale),
        ));
    }
    let n = q.cutoff();
    let rescaled = q.value() * scale;
    let integer_part = rescaled.floor();
    let fraction = RationalQuantity::wrapping(rescaled.clone());
    let digits_needed = ratio::dyadic_exponent(fraction.value());
    let kept = fraction.digits(n)?;
    let lost = match digits_needed {
        Some(a) if a <= n => LostDigits::None,
        Some(a) => {
            let tail = fraction.digits(a)?;
            LostDigits::Finite((n + 1..=a).filter(|&j| tail[(j - 1) as usize]).collect())
        }
        None => LostDigits::Infinite,
    };
    Ok(TruncationReport {
        original: q.to_string(),
        cutoff: n,
        scale: ratio::format_rational(scale),
        rescaled: ratio::format_rational(&rescaled),
        integer_part: ratio::format_rational(&integer_part),
        digits_needed,
        representable: ratio::bits_to_string(&kept),
        lossless: lost == LostDigits::None,
        lost,
    })
}

impl TruncationReport {
    pub(crate) fn table(&self) -> Table {
        let fraction = RationalQuantity::wrapping(
            ratio::parse_rational(&self.rescaled).expect("formatted rational"),
        );
        let shown = self
            .digits_needed
            .unwrap_or(self.cutoff + SHOWN_PAST_CUTOFF)
            .max(self.cutoff);
        let digits = fraction.digits(shown).expect("unbounded");
        Table {
            header: vec!["position".into(), "digit".into(), "kept".into()],
            rows: digits
                .iter()
                .enumerate()
                .map(|(i, &d)| {
                    let pos = i as u64 + 1;
                    vec![
                        pos.to_string(),
                        u8::from(d).to_string(),
                        (pos <= self.cutoff).to_string(),
                    ]
                })
                .collect(),
        }
    }
}
