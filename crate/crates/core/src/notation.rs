//! The textual quantity notation used on the command line and in configs.
//!
//! ```text
//! quantity   := fiq | domain
//! fiq        := "fiq:" [ field { "," field } ]
//! field      := "prefix=" bits | "window=" [ rational { ";" rational } ] | "clock=" integer
//! domain     := "rational:" rational
//!             | "truncated:" bits ":" integer
//!             | "computable:" name          ; sqrt2_minus_1 | pi_minus_3 | rational:p/q
//! rational   := integer [ "/" integer ]
//! bits       := { "0" | "1" }
//! ```
//!
//! Maps (`shift:s`, `rotation:p/q`) and engines (`none`, `spontaneous:p/q`,
//! `measurement:k`) parse through `FromStr` on their own types.

use std::fmt;
use std::str::FromStr;

use crate::domains::ExactDomain;
use crate::error::ParseError;
use crate::fiq::{parse_bits, Fiq};
use crate::propensity::Propensity;
use crate::ratio;

/// Any quantity the notation can describe.
#[derive(Debug, Clone)]
pub enum Quantity {
    Fiq(Fiq),
    Exact(ExactDomain),
}

impl FromStr for Quantity {
    type Err = ParseError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.strip_prefix("fiq:") {
            Some(fields) => parse_fiq_fields(fields).map(Quantity::Fiq),
            None if s == "fiq" => Ok(Quantity::Fiq(Fiq::indeterminate())),
            None => s.parse().map(Quantity::Exact),
        }
    }
}

impl fmt::Display for Quantity {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Quantity::Fiq(q) => f.write_str(&format_fiq(q)),
            Quantity::Exact(d) => write!(f, "{d}"),
        }
    }
}

fn parse_fiq_fields(fields: &str) -> Result<Fiq, ParseError> {
    let malformed = |reason: String| ParseError::Malformed {
        kind: "fiq",
        input: fields.to_string(),
        reason,
    };
    let mut prefix = Vec::new();
    let mut window = Vec::new();
    let mut clock = 0u64;
    for field in fields.split(',').map(str::trim).filter(|f| !f.is_empty()) {
        let (key, value) = field
            .split_once('=')
            .ok_or_else(|| malformed(format!("field {field:?} is not key=value")))?;
        match key {
            "prefix" => prefix = parse_bits(value)?,
            "window" => {
                window = value
                    .split(';')
                    .map(str::trim)
                    .filter(|q| !q.is_empty())
                    .map(Propensity::from_str)
                    .collect::<Result<_, _>>()?
            }
            "clock" => {
                clock = value
                    .parse()
                    .map_err(|_| ParseError::Integer(value.to_string()))?
            }
            other => return Err(malformed(format!("unknown field {other:?}"))),
        }
    }
    Ok(Fiq::new(prefix, window, clock)?)
}

/// Renders a quantity back into `fiq:prefix=...,window=...,clock=...`.
pub fn format_fiq(f: &Fiq) -> String {
    let window: Vec<String> = f.window().iter().map(|q| q.to_string()).collect();
    format!(
        "fiq:prefix={},window={},clock={}",
        ratio::bits_to_string(f.prefix()),
        window.join(";"),
        f.clock()
    )
}
