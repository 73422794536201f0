//! Ensemble experiments and the declarative harness that runs them.
//!
//! A run is described by an [`ExperimentConfig`] (JSON, schema
//! [`CONFIG_SCHEMA`]). Every field has a default, and the effective config,
//! defaults filled in, is echoed into the summary so that feeding the echo
//! back reproduces the results file byte for byte.
//!
//! ```json
//! {
//!   "schema": "fiq-experiment/1",
//!   "seed": 7,
//!   "tolerances": { "chi_square_p_min": 0.01, "sigma_band": 4.0, "variance_rel_tol": 0.15 },
//!   "experiment": { "name": "emergence", "particles": [1, 10, 100, 1000], "replicas": 2000, "depth": 16 }
//! }
//! ```

mod emergence;
mod indistinguishability;
mod recurrence;
mod stability;
pub mod stats;
mod truncation;

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};
use std::time::Instant;

use serde::{Deserialize, Serialize};

pub use emergence::{emergence_test, EmergenceParams, EmergenceReport, VarianceRow};
pub use indistinguishability::{
    indistinguishability_test, IndistinguishabilityParams, IndistinguishabilityReport,
};
pub use recurrence::{
    fiq_recurrence, rational_recurrence, FiqRecurrence, FiqReplica, RationalRecurrence,
    RecurrenceReport,
};
pub use stability::{measurement_stability_test, StabilityParams, StabilityReport};
pub use truncation::{truncation_unit_dependence_demo, LostDigits, TruncationReport};

use crate::domains::ExactDomain;
use crate::error::ExperimentError;
use crate::fiq::Fiq;
use crate::notation::Quantity;
use crate::ratio;

pub const CONFIG_SCHEMA: &str = "fiq-experiment/1";
pub const SUMMARY_SCHEMA: &str = "fiq-summary/1";
pub const CODE_VERSION: &str = env!("CARGO_PKG_VERSION");

/// Every experiment name the harness dispatches on.
pub const EXPERIMENT_NAMES: [&str; 5] = [
    "indistinguishability",
    "measurement_stability",
    "recurrence",
    "emergence",
    "truncation_units",
];

fn config_schema() -> String {
    CONFIG_SCHEMA.to_string()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Tolerances {
    pub chi_square_p_min: f64,
    /// Width of binomial frequency bands, in standard deviations.
    pub sigma_band: f64,
    pub variance_rel_tol: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Tolerances {
            chi_square_p_min: 0.01,
            sigma_band: 4.0,
            variance_rel_tol: 0.15,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct IndistinguishabilityConfig {
    /// Initial condition in quantity notation; must be a Fiq.
    pub initial: String,
    pub resolution: usize,
    pub replicas: u64,
    pub steps: u64,
    pub matched: bool,
}

impl Default for IndistinguishabilityConfig {
    fn default() -> Self {
        IndistinguishabilityConfig {
            initial: "fiq:".into(),
            resolution: 3,
            replicas: 8000,
            steps: 10,
            matched: false,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct StabilityConfig {
    pub initial: String,
    pub schedule: Vec<usize>,
    pub replicas: u64,
}

impl Default for StabilityConfig {
    fn default() -> Self {
        StabilityConfig {
            initial: "fiq:".into(),
            schedule: vec![2, 4, 8, 8, 4],
            replicas: 1000,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RecurrenceConfig {
    /// A Fiq, or `rational:p/q` for a deterministic initial condition.
    pub initial: String,
    pub resolution: usize,
    pub steps: u64,
    /// Ignored for rational initial conditions.
    pub replicas: u64,
}

impl Default for RecurrenceConfig {
    fn default() -> Self {
        RecurrenceConfig {
            initial: "fiq:".into(),
            resolution: 10,
            steps: 50,
            replicas: 10_000,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct EmergenceConfig {
    pub particles: Vec<usize>,
    pub replicas: u64,
    pub depth: usize,
}

impl Default for EmergenceConfig {
    fn default() -> Self {
        EmergenceConfig {
            particles: vec![1, 10, 100, 1000],
            replicas: 2000,
            depth: 16,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct TruncationConfig {
    /// A `truncated:bits:n` quantity.
    pub quantity: String,
    pub scale: String,
}

impl Default for TruncationConfig {
    fn default() -> Self {
        TruncationConfig {
            quantity: "truncated:101:3".into(),
            scale: "1/2".into(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "name", rename_all = "snake_case")]
pub enum ExperimentSpec {
    Indistinguishability(IndistinguishabilityConfig),
    MeasurementStability(StabilityConfig),
    Recurrence(RecurrenceConfig),
    Emergence(EmergenceConfig),
    TruncationUnits(TruncationConfig),
}

impl ExperimentSpec {
    /// The default parameters for a named experiment.
    pub fn default_for(name: &str) -> Result<Self, ExperimentError> {
        Ok(match name {
            "indistinguishability" => ExperimentSpec::Indistinguishability(Default::default()),
            "measurement_stability" => ExperimentSpec::MeasurementStability(Default::default()),
            "recurrence" => ExperimentSpec::Recurrence(Default::default()),
            "emergence" => ExperimentSpec::Emergence(Default::default()),
            "truncation_units" => ExperimentSpec::TruncationUnits(Default::default()),
            other => {
                return Err(ExperimentError::Config(format!(
                    "unknown experiment {other:?} (expected one of {})",
                    EXPERIMENT_NAMES.join(", ")
                )))
            }
        })
    }

    pub fn name(&self) -> &'static str {
        match self {
            ExperimentSpec::Indistinguishability(_) => "indistinguishability",
            ExperimentSpec::MeasurementStability(_) => "measurement_stability",
            ExperimentSpec::Recurrence(_) => "recurrence",
            ExperimentSpec::Emergence(_) => "emergence",
            ExperimentSpec::TruncationUnits(_) => "truncation_units",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    #[serde(default = "config_schema")]
    pub schema: String,
    #[serde(default)]
    pub seed: u64,
    #[serde(default)]
    pub tolerances: Tolerances,
    pub experiment: ExperimentSpec,
}

/// A config file before its experiment is resolved: the name may come from
/// the command line instead.
#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
struct PartialConfig {
    #[serde(default = "config_schema")]
    schema: String,
    #[serde(default)]
    seed: u64,
    #[serde(default)]
    tolerances: Tolerances,
    experiment: Option<ExperimentSpec>,
}

impl ExperimentConfig {
    pub fn new(experiment: ExperimentSpec, seed: u64) -> Self {
        ExperimentConfig {
            schema: config_schema(),
            seed,
            tolerances: Tolerances::default(),
            experiment,
        }
    }

    /// Parses a config document. `name`, if given, selects the experiment
    /// when the document has none and must agree with it otherwise.
    pub fn from_json(text: &str, name: Option<&str>) -> Result<Self, ExperimentError> {
        let partial: PartialConfig = serde_json::from_str(text)?;
        if partial.schema != CONFIG_SCHEMA {
            return Err(ExperimentError::Schema {
                found: partial.schema,
                expected: CONFIG_SCHEMA.into(),
            });
        }
        let experiment = match (partial.experiment, name) {
            (Some(e), Some(n)) if e.name() != n => {
                return Err(ExperimentError::Config(format!(
                    "config describes {:?} but {n:?} was requested",
                    e.name()
                )))
            }
            (Some(e), _) => e,
            (None, Some(n)) => ExperimentSpec::default_for(n)?,
            (None, None) => return Err(ExperimentError::Config("no experiment named".into())),
        };
        Ok(ExperimentConfig {
            schema: partial.schema,
            seed: partial.seed,
            tolerances: partial.tolerances,
            experiment,
        })
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("config serializes")
    }
}

/// One pre-registered check with its raw statistic.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Assertion {
    pub name: String,
    pub statistic: f64,
    pub comparison: String,
    pub passed: bool,
}

impl Assertion {
    pub fn at_least(name: &str, statistic: f64, threshold: f64) -> Self {
        Assertion {
            name: name.into(),
            statistic,
            comparison: format!(">= {threshold}"),
            passed: statistic >= threshold,
        }
    }

    pub fn equals(name: &str, statistic: f64, expected: f64) -> Self {
        Assertion {
            name: name.into(),
            statistic,
            comparison: format!("== {expected}"),
            passed: statistic == expected,
        }
    }

    pub fn within(name: &str, statistic: f64, expected: f64, tolerance: f64) -> Self {
        Assertion {
            name: name.into(),
            statistic,
            comparison: format!("within {tolerance} of {expected}"),
            passed: (statistic - expected).abs() <= tolerance,
        }
    }

    pub fn flag(name: &str, holds: bool) -> Self {
        Assertion {
            name: name.into(),
            statistic: f64::from(u8::from(holds)),
            comparison: "== 1".into(),
            passed: holds,
        }
    }
}

/// Per-replica results, written as CSV.
#[derive(Debug, Clone, PartialEq)]
pub struct Table {
    pub header: Vec<String>,
    pub rows: Vec<Vec<String>>,
}

impl Table {
    /// Cells never contain commas, quotes or newlines.
    pub fn to_csv(&self) -> String {
        let mut out = self.header.join(",");
        out.push('\n');
        for row in &self.rows {
            let _ = writeln!(out, "{}", row.join(","));
        }
        out
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct LineageInfo {
    pub seed: u64,
    pub generator: &'static str,
    /// How replica `r` of block `b` maps to a stream id.
    pub streams: String,
}

#[derive(Debug, Clone, Serialize)]
pub struct ExperimentSummary {
    pub schema: &'static str,
    pub experiment: &'static str,
    pub code_version: &'static str,
    pub config: ExperimentConfig,
    pub lineage: LineageInfo,
    pub passed: bool,
    pub assertions: Vec<Assertion>,
    pub statistics: serde_json::Value,
    pub runtime_ms: u64,
}

/// Configuration, results and summary of one run.
#[derive(Debug, Clone)]
pub struct ExperimentRun {
    pub summary: ExperimentSummary,
    pub results: Table,
}

impl ExperimentRun {
    pub fn passed(&self) -> bool {
        self.summary.passed
    }

    pub fn summary_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(&self.summary).expect("summary serializes");
        s.push('\n');
        s
    }

    /// Writes `<name>.results.csv` and `<name>.summary.json` into `dir`.
    pub fn write(&self, dir: &Path) -> Result<(PathBuf, PathBuf), ExperimentError> {
        fs::create_dir_all(dir)?;
        let name = self.summary.experiment;
        let results = dir.join(format!("{name}.results.csv"));
        let summary = dir.join(format!("{name}.summary.json"));
        fs::write(&results, self.results.to_csv())?;
        fs::write(&summary, self.summary_json())?;
        Ok((results, summary))
    }
}

fn parse_fiq(s: &str) -> Result<Fiq, ExperimentError> {
    match s.parse::<Quantity>()? {
        Quantity::Fiq(f) => Ok(f),
        Quantity::Exact(_) => Err(ExperimentError::Config(format!(
            "initial condition {s:?} must be a fiq"
        ))),
    }
}

fn require(cond: bool, msg: &str) -> Result<(), ExperimentError> {
    if cond {
        Ok(())
    } else {
        Err(ExperimentError::Config(msg.into()))
    }
}

fn to_value<T: Serialize>(v: &T) -> serde_json::Value {
    serde_json::to_value(v).expect("report serializes")
}

/// Runs the configured experiment.
pub fn run_experiment(config: &ExperimentConfig) -> Result<ExperimentRun, ExperimentError> {
    if config.schema != CONFIG_SCHEMA {
        return Err(ExperimentError::Schema {
            found: config.schema.clone(),
            expected: CONFIG_SCHEMA.into(),
        });
    }
    let started = Instant::now();
    let seed = config.seed;
    let tol = &config.tolerances;
    let (assertions, statistics, results, streams) = match &config.experiment {
        ExperimentSpec::Indistinguishability(c) => {
            require(
                c.resolution >= 1 && c.resolution <= 20,
                "resolution must be in 1..=20",
            )?;
            require(c.replicas >= 1, "replicas must be positive")?;
            let p = IndistinguishabilityParams {
                initial: parse_fiq(&c.initial)?,
                resolution: c.resolution,
                replicas: c.replicas,
                steps: c.steps,
                matched: c.matched,
                seed,
            };
            let r = indistinguishability_test(&p, tol.sigma_band);
            let streams = if c.matched {
                "both ensembles: r"
            } else {
                "fiq ensemble: r; hidden-variable ensemble: replicas + r"
            };
            (
                r.assertions(&p, tol.chi_square_p_min),
                to_value(&r),
                r.table(),
                streams,
            )
        }
        ExperimentSpec::MeasurementStability(c) => {
            require(
                c.schedule.iter().all(|&k| k >= 1),
                "resolutions must be positive",
            )?;
            let p = StabilityParams {
                initial: parse_fiq(&c.initial)?,
                schedule: c.schedule.clone(),
                replicas: c.replicas,
                seed,
            };
            let r = measurement_stability_test(&p);
            (r.assertions(), to_value(&r), r.table(&c.schedule), "r")
        }
        ExperimentSpec::Recurrence(c) => {
            require(
                c.resolution >= 1 && c.resolution <= 64,
                "resolution must be in 1..=64",
            )?;
            require(c.steps >= 2, "steps must be at least 2")?;
            let r = match c.initial.parse::<Quantity>()? {
                Quantity::Exact(ExactDomain::Rational(x)) => {
                    RecurrenceReport::Rational(rational_recurrence(&x, c.resolution, c.steps))
                }
                Quantity::Fiq(f) => {
                    require(c.replicas >= 1, "replicas must be positive")?;
                    RecurrenceReport::Fiq(fiq_recurrence(
                        &f,
                        c.resolution,
                        c.steps,
                        c.replicas,
                        seed,
                        tol.sigma_band,
                    ))
                }
                Quantity::Exact(_) => {
                    return Err(ExperimentError::Config(
                        "recurrence needs a fiq or rational initial condition".into(),
                    ))
                }
            };
            (r.assertions(), to_value(&r), r.table(), "r")
        }
        ExperimentSpec::Emergence(c) => {
            require(!c.particles.is_empty(), "particles must be nonempty")?;
            require(
                c.particles.iter().all(|&n| n >= 1),
                "particle counts must be positive",
            )?;
            require(c.replicas >= 2, "replicas must be at least 2")?;
            require(c.depth >= 1 && c.depth <= 52, "depth must be in 1..=52")?;
            let r = emergence_test(&EmergenceParams {
                particles: c.particles.clone(),
                replicas: c.replicas,
                depth: c.depth,
                seed,
            });
            (
                r.assertions(tol.variance_rel_tol),
                to_value(&r),
                r.table(),
                "b * replicas + r",
            )
        }
        ExperimentSpec::TruncationUnits(c) => {
            let q = match c.quantity.parse::<ExactDomain>()? {
                ExactDomain::Truncated(t) => t,
                _ => {
                    return Err(ExperimentError::Config(
                        "truncation_units needs a truncated:bits:n quantity".into(),
                    ))
                }
            };
            let scale = ratio::parse_rational(&c.scale)?;
            let r = truncation_unit_dependence_demo(&q, &scale)?;
            (Vec::new(), to_value(&r), r.table(), "none drawn")
        }
    };
    let passed = assertions.iter().all(|a| a.passed);
    Ok(ExperimentRun {
        summary: ExperimentSummary {
            schema: SUMMARY_SCHEMA,
            experiment: config.experiment.name(),
            code_version: CODE_VERSION,
            config: config.clone(),
            lineage: LineageInfo {
                seed,
                generator: "chacha8",
                streams: streams.into(),
            },
            passed,
            assertions,
            statistics,
            runtime_ms: started.elapsed().as_millis() as u64,
        },
        results,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn defaults_fill_in_and_echo_round_trips() {
        let c = ExperimentConfig::from_json(r#"{"seed": 3}"#, Some("emergence")).unwrap();
        assert_eq!(c.tolerances, Tolerances::default());
        let echoed = ExperimentConfig::from_json(&c.to_json(), None).unwrap();
        assert_eq!(echoed, c);
        assert!(c.to_json().contains("\"particles\""));
    }

    #[test]
    fn partial_params_keep_other_defaults() {
        let c = ExperimentConfig::from_json(
            r#"{"experiment": {"name": "recurrence", "initial": "rational:1/5", "resolution": 4}}"#,
            None,
        )
        .unwrap();
        match c.experiment {
            ExperimentSpec::Recurrence(r) => assert_eq!((r.steps, r.resolution), (50, 4)),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn bad_configs_are_rejected() {
        assert!(matches!(
            ExperimentConfig::from_json(r#"{"schema": "fiq-experiment/0"}"#, Some("emergence")),
            Err(ExperimentError::Schema { .. })
        ));
        assert!(ExperimentConfig::from_json("{}", Some("nope")).is_err());
        assert!(ExperimentConfig::from_json("{}", None).is_err());
        assert!(ExperimentConfig::from_json(r#"{"sed": 1}"#, Some("emergence")).is_err());
        let c = r#"{"experiment": {"name": "emergence"}}"#;
        assert!(ExperimentConfig::from_json(c, Some("recurrence")).is_err());
    }

    #[test]
    fn rerun_is_byte_identical() {
        let spec = StabilityConfig {
            replicas: 50,
            ..Default::default()
        };
        let c = ExperimentConfig::new(ExperimentSpec::MeasurementStability(spec), 11);
        let (a, b) = (run_experiment(&c).unwrap(), run_experiment(&c).unwrap());
        assert_eq!(a.results.to_csv(), b.results.to_csv());
        assert_eq!(
            to_value(&a.summary.statistics),
            to_value(&b.summary.statistics)
        );
        assert!(a.passed());
    }

    #[test]
    fn truncation_demo_runs_without_assertions() {
        let c = ExperimentConfig::new(ExperimentSpec::default_for("truncation_units").unwrap(), 0);
        let run = run_experiment(&c).unwrap();
        assert!(run.passed());
        assert_eq!(
            run.summary.statistics["lost"]["positions"],
            serde_json::json!([4])
        );
        assert!(run
            .results
            .to_csv()
            .starts_with("position,digit,kept\n1,0,true\n"));
    }

    #[test]
    fn rational_recurrence_reports_period() {
        let c = ExperimentConfig::from_json(
            r#"{"experiment": {"name": "recurrence", "initial": "rational:1/3", "resolution": 2, "steps": 10}}"#,
            None,
        )
        .unwrap();
        let run = run_experiment(&c).unwrap();
        assert!(run.passed());
        assert_eq!(run.summary.statistics["first_return"], 2);
        assert_eq!(run.summary.statistics["expansion"]["period"], 2);
    }
}
