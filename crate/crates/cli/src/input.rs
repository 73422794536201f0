//! Reading quantities from notation strings or JSON files.

use std::fs;
use std::path::Path;

use anyhow::{anyhow, bail, Context, Result};
use serde_json::Value;

use fiq_core::notation::Quantity;
use fiq_core::{to_fiq, ExactDomain, ExactValue, Fiq, FiqDocument, Snapshot};

pub enum Loaded {
    Fiq(Fiq),
    Exact(ExactValue),
}

/// Rationals and truncated reals evolve exactly; computable reals have no
/// exact shift and must be frozen to a Fiq first.
pub fn exact_value(d: &ExactDomain) -> Option<ExactValue> {
    match d {
        ExactDomain::Rational(r) => Some(ExactValue::Rational(r.clone())),
        ExactDomain::Truncated(t) => Some(ExactValue::Truncated(t.clone())),
        ExactDomain::Computable(_) => None,
    }
}

fn from_quantity(q: Quantity, take: Option<u64>) -> Result<Loaded> {
    match q {
        Quantity::Fiq(f) => Ok(Loaded::Fiq(f)),
        Quantity::Exact(d) => match (take, exact_value(&d)) {
            (Some(n), _) => Ok(Loaded::Fiq(to_fiq(&d, n)?)),
            (None, Some(x)) => Ok(Loaded::Exact(x)),
            (None, None) => bail!("{d} has no exact evolution; pass --take to freeze its digits"),
        },
    }
}

/// `input` names a JSON file if one exists at that path and is otherwise
/// read as quantity notation. `--take` freezes an exact quantity's leading
/// digits into a Fiq.
pub fn load(input: &str, take: Option<u64>) -> Result<Loaded> {
    let path = Path::new(input);
    if !path.is_file() {
        return from_quantity(input.parse()?, take);
    }
    let text = fs::read_to_string(path).with_context(|| format!("reading {input}"))?;
    let value: Value = serde_json::from_str(&text).with_context(|| format!("parsing {input}"))?;
    if let Some(spec) = value.get("spec").and_then(Value::as_str) {
        return from_quantity(spec.parse()?, take);
    }
    let (doc, _) = candidate(&value)?;
    Ok(Loaded::Fiq(Fiq::try_from(doc)?))
}

/// The Fiq document inside a JSON value, and its history if present.
/// Accepts a bare document or an object holding one under `"fiq"`.
pub fn candidate(value: &Value) -> Result<(FiqDocument, Option<Vec<Snapshot>>)> {
    let doc = value.get("fiq").unwrap_or(value);
    let doc: FiqDocument =
        serde_json::from_value(doc.clone()).map_err(|e| anyhow!("not a quantity document: {e}"))?;
    let history = match value.get("history") {
        Some(h) => Some(serde_json::from_value(h.clone()).context("malformed history")?),
        None => None,
    };
    Ok((doc, history))
}
