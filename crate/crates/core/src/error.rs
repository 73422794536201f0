use thiserror::Error;

/// Errors raised while constructing or parsing quantities.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum FiqError {
    #[error("propensity {0} lies outside [0, 1]")]
    PropensityOutOfRange(String),
    #[error("zero denominator in rational {0}")]
    ZeroDenominator(String),
    #[error("window must exclude certain propensities (digit {index} has propensity {value})")]
    CertainPropensityInWindow { index: usize, value: String },
    #[error("invalid bit {0:?}: determined digits are 0 or 1")]
    InvalidBit(char),
}

/// Errors raised by the number-domain representations.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum DomainError {
    #[error(
        "precision exceeded: digit {requested} requested but the representation stops at {cutoff}"
    )]
    PrecisionExceeded { requested: u64, cutoff: u64 },
    #[error("value {0} is outside [0, 1)")]
    OutOfUnitInterval(String),
    #[error("truncated real holds {len} bits but its cutoff is {cutoff}")]
    TooManyBits { len: usize, cutoff: u64 },
    #[error("truncation cutoff must be positive")]
    ZeroCutoff,
    #[error("unknown computable generator {0:?}")]
    UnknownGenerator(String),
    #[error("length {0} is negative")]
    NegativeLength(String),
    #[error("digit positions start at 1")]
    ZeroPosition,
}

/// Errors raised by the dynamics.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum DynamicsError {
    #[error("rotation increment {0} is not dyadic")]
    NonDyadicRotation(String),
    #[error("rotation increment {0} is outside [0, 1)")]
    RotationOutOfRange(String),
    #[error("shift amount must be positive")]
    ZeroShift,
    #[error(transparent)]
    Domain(#[from] DomainError),
}

/// Errors raised while parsing the textual quantity/map/engine notation.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ParseError {
    #[error("malformed rational {0:?} (expected p/q)")]
    Rational(String),
    #[error("malformed integer {0:?}")]
    Integer(String),
    #[error("unknown {kind} {input:?}")]
    Unknown { kind: &'static str, input: String },
    #[error("malformed {kind} {input:?}: {reason}")]
    Malformed {
        kind: &'static str,
        input: String,
        reason: String,
    },
    #[error(transparent)]
    Fiq(#[from] FiqError),
    #[error(transparent)]
    Domain(#[from] DomainError),
    #[error(transparent)]
    Dynamics(#[from] DynamicsError),
}

/// Errors raised by the experiment harness.
#[derive(Debug, Error)]
pub enum ExperimentError {
    #[error("invalid experiment configuration: {0}")]
    Config(String),
    #[error("unsupported config schema {found:?} (expected {expected:?})")]
    Schema { found: String, expected: String },
    #[error(transparent)]
    Parse(#[from] ParseError),
    #[error(transparent)]
    Domain(#[from] DomainError),
    #[error(transparent)]
    Dynamics(#[from] DynamicsError),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}
