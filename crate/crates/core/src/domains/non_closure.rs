use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{Signed, Zero};
use serde::Serialize;

use crate::error::DomainError;
use crate::ratio::format_rational;

/// One closed-form construction applied to a rational input.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ClosureEntry {
    pub operation: &'static str,
    pub input: String,
    pub result: String,
    pub rational: bool,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct NonClosureReport {
    pub input: String,
    pub entries: Vec<ClosureEntry>,
}

impl NonClosureReport {
    pub fn entry(&self, operation: &str) -> Option<&ClosureEntry> {
        self.entries.iter().find(|e| e.operation == operation)
    }
}

fn exact_sqrt(n: &BigInt) -> Option<BigInt> {
    if n.is_negative() {
        return None;
    }
    let r = n.sqrt();
    (&r * &r == *n).then_some(r)
}

/// Square root of a nonnegative rational in lowest terms, when rational.
fn rational_sqrt(x: &BigRational) -> Option<BigRational> {
    Some(BigRational::new(
        exact_sqrt(x.numer())?,
        exact_sqrt(x.denom())?,
    ))
}

/// Irrational factor times a rational, printed as `√2`, `π`, `3·√2`, ...
fn scaled_symbol(symbol: &str, x: &BigRational) -> String {
    if x == &BigRational::from_integer(1.into()) {
        symbol.to_string()
    } else {
        format!("{}·{}", format_rational(x), symbol)
    }
}

/// Runs a fixed catalog of constructions on a rational length (a square's
/// edge or a circle's diameter) and flags which results leave the rationals.
///
/// That √2 and π are irrational is catalog knowledge, not proven here. The
/// square-root entry is decided exactly: a reduced fraction has a rational
/// root iff numerator and denominator are perfect squares.
pub fn non_closure_demo(length: &BigRational) -> Result<NonClosureReport, DomainError> {
    if length.is_negative() {
        return Err(DomainError::NegativeLength(format_rational(length)));
    }
    let x = length;
    let input = format_rational(x);
    let zero = x.is_zero();
    let mut entries = Vec::new();

    entries.push(ClosureEntry {
        operation: "square",
        input: input.clone(),
        result: format_rational(&(x * x)),
        rational: true,
    });

    let (result, rational) = match rational_sqrt(x) {
        Some(r) => (format_rational(&r), true),
        None => (format!("√({input})"), false),
    };
    entries.push(ClosureEntry {
        operation: "square_root",
        input: input.clone(),
        result,
        rational,
    });

    entries.push(ClosureEntry {
        operation: "square_diagonal",
        input: input.clone(),
        result: if zero {
            "0".into()
        } else {
            scaled_symbol("√2", x)
        },
        rational: zero,
    });

    entries.push(ClosureEntry {
        operation: "circle_circumference",
        input: input.clone(),
        result: if zero {
            "0".into()
        } else {
            scaled_symbol("π", x)
        },
        rational: zero,
    });

    Ok(NonClosureReport { input, entries })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ratio::parse_rational;

    fn demo(x: &str) -> NonClosureReport {
        non_closure_demo(&parse_rational(x).unwrap()).unwrap()
    }

    #[test]
    fn unit_square_and_circle() {
        let report = demo("1");
        let diag = report.entry("square_diagonal").unwrap();
        assert_eq!((diag.result.as_str(), diag.rational), ("√2", false));
        let circ = report.entry("circle_circumference").unwrap();
        assert_eq!((circ.result.as_str(), circ.rational), ("π", false));
    }

    #[test]
    fn quarter_squared_stays_rational() {
        let report = demo("1/4");
        let sq = report.entry("square").unwrap();
        assert_eq!((sq.result.as_str(), sq.rational), ("1/16", true));
        let root = report.entry("square_root").unwrap();
        assert_eq!((root.result.as_str(), root.rational), ("1/2", true));
    }

    #[test]
    fn square_root_of_non_square() {
        let report = demo("1/2");
        assert!(!report.entry("square_root").unwrap().rational);
        assert_eq!(report.entry("square_diagonal").unwrap().result, "1/2·√2");
    }

    #[test]
    fn zero_is_degenerate() {
        assert!(demo("0").entries.iter().all(|e| e.rational));
        assert!(non_closure_demo(&parse_rational("-1").unwrap()).is_err());
    }
}
