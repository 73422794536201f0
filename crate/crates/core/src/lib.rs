//! Finite-information quantities: numbers in `[0, 1)` whose binary digits
//! are actualized lazily from exact rational propensities, together with
//! the rival exact number domains, chaotic shift dynamics and a statistical
//! experiment harness.

pub mod actualization;
pub mod domains;
pub mod dynamics;
pub mod error;
pub mod experiments;
pub mod fiq;
pub mod notation;
pub mod propensity;
pub mod ratio;

pub use actualization::{
    actualize_next, measure, sample_digit, step_spontaneous, Lineage, MeasurementEngine,
    RandomBits, RandomnessSource, Reading, SpontaneousEngine,
};
pub use domains::{
    to_fiq, ComputableReal, DigitSource, ExactDomain, Precision, RationalQuantity, TruncatedReal,
};
pub use dynamics::{
    evolve_exact, evolve_fiq, evolve_fiq_rotation, Engine, ExactValue, MapSpec, RotationMap,
    ShiftMap,
};
pub use error::{DomainError, DynamicsError, ExperimentError, FiqError, ParseError};
pub use fiq::{validate, DigitStatus, Fiq, FiqDocument, Snapshot, ValidityReport};
pub use propensity::{binary_entropy, Propensity};
