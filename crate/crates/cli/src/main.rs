mod input;

use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{anyhow, Context};
use clap::{Parser, Subcommand, ValueEnum};
use serde::Serialize;
use serde_json::{json, Value};

use fiq_core::domains::{DigitSource, Precision};
use fiq_core::dynamics::{evolve_logged, TrajectoryRow};
use fiq_core::experiments::{run_experiment, ExperimentConfig, ExperimentSpec, CODE_VERSION};
use fiq_core::notation::Quantity;
use fiq_core::{
    evolve_exact, validate, Engine, ExactDomain, FiqDocument, MapSpec, MeasurementEngine,
    RandomnessSource, Snapshot,
};

use input::{load, Loaded};

#[derive(Parser, Debug)]
#[command(
    name = "fiq",
    version,
    about = "Finite-information quantities: build, evolve, measure, experiment"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,

    /// Seed of the randomness source
    #[arg(long, global = true)]
    seed: Option<u64>,

    /// Output path (a directory for `experiment`)
    #[arg(long, global = true)]
    out: Option<PathBuf>,

    #[arg(long, global = true, value_enum)]
    format: Option<Format>,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
enum Format {
    Json,
    Csv,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Construct a quantity from its notation and write its JSON
    Make {
        /// e.g. `rational:1/3`, `fiq:prefix=101,window=3/10;1/4`
        spec: String,
        /// Digits of an exact quantity to list and to freeze into a Fiq
        #[arg(long)]
        take: Option<u64>,
    },
    /// Evolve a quantity under a map and write the trajectory
    Evolve {
        /// Quantity notation or a JSON file written by `make`, `measure` or `evolve`
        input: String,
        #[arg(long, default_value = "shift:1")]
        map: String,
        #[arg(long, default_value = "none")]
        engine: String,
        #[arg(long, default_value_t = 1)]
        steps: u64,
        /// Digits of a computable quantity to freeze before evolving
        #[arg(long)]
        take: Option<u64>,
        /// Write the final quantity and its history here
        #[arg(long)]
        state: Option<PathBuf>,
    },
    /// Measure the leading digits of a quantity
    Measure {
        input: String,
        #[arg(long)]
        resolution: usize,
        #[arg(long)]
        take: Option<u64>,
    },
    /// Run a named experiment
    Experiment {
        #[arg(long)]
        name: Option<String>,
        /// JSON run config; omitted fields take their defaults
        #[arg(long)]
        config: Option<PathBuf>,
    },
    /// Check a quantity JSON file against every invariant
    Validate {
        file: PathBuf,
        /// JSON array of snapshots to check for irreversibility
        #[arg(long)]
        history: Option<PathBuf>,
    },
}

/// Failure classes, each with its own exit status.
#[derive(Debug)]
enum Failure {
    Invalid(anyhow::Error),
    Usage(anyhow::Error),
    Statistical,
}

impl Failure {
    fn code(&self) -> u8 {
        match self {
            Failure::Invalid(_) => 1,
            Failure::Usage(_) => 2,
            Failure::Statistical => 3,
        }
    }
}

fn usage<E: Into<anyhow::Error>>(e: E) -> Failure {
    Failure::Usage(e.into())
}

fn invalid<E: Into<anyhow::Error>>(e: E) -> Failure {
    Failure::Invalid(e.into())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            match &f {
                Failure::Invalid(e) | Failure::Usage(e) => eprintln!("error: {e:#}"),
                Failure::Statistical => eprintln!("statistical assertions failed"),
            }
            ExitCode::from(f.code())
        }
    }
}

/// Prints the effective configuration to stderr and, when writing to a
/// file, next to it as `<out>.meta.json`.
fn emit_meta(out: Option<&Path>, meta: &Value) -> Result<(), Failure> {
    let text = serde_json::to_string_pretty(meta).expect("meta serializes");
    eprintln!("{text}");
    if let Some(out) = out {
        let mut path = out.as_os_str().to_owned();
        path.push(".meta.json");
        fs::write(&path, text + "\n")
            .with_context(|| format!("writing {}", Path::new(&path).display()))
            .map_err(invalid)?;
    }
    Ok(())
}

fn write_output(out: Option<&Path>, text: &str) -> Result<(), Failure> {
    match out {
        Some(path) => fs::write(path, text)
            .with_context(|| format!("writing {}", path.display()))
            .map_err(invalid),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn pretty<T: Serialize>(v: &T) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("value serializes");
    s.push('\n');
    s
}

fn run(cli: Cli) -> Result<(), Failure> {
    let seed = cli.seed.unwrap_or(0);
    let out = cli.out.as_deref();
    match cli.command {
        Command::Make { spec, take } => {
            require_format(cli.format, &[Format::Json])?;
            let q: Quantity = spec.parse().map_err(usage)?;
            let doc = match &q {
                Quantity::Fiq(f) => serde_json::to_value(f).expect("fiq serializes"),
                Quantity::Exact(d) => describe_exact(d, take).map_err(invalid)?,
            };
            emit_meta(
                out,
                &json!({
                    "command": "make",
                    "version": CODE_VERSION,
                    "seed": seed,
                    "config": { "spec": spec, "take": take, "format": "json" },
                    "lineage": Value::Null,
                }),
            )?;
            write_output(out, &pretty(&doc))
        }
        Command::Evolve {
            input,
            map,
            engine,
            steps,
            take,
            state,
        } => {
            let format = cli.format.unwrap_or(Format::Csv);
            let map_spec: MapSpec = map.parse().map_err(usage)?;
            let mut engine_spec: Engine = engine.parse().map_err(usage)?;
            let loaded = load(&input, take).map_err(usage)?;
            let config = json!({
                "input": input, "map": map_spec.to_string(), "engine": engine_spec.to_string(),
                "steps": steps, "take": take, "format": format,
            });
            match loaded {
                Loaded::Fiq(mut f) => {
                    let mut rng = RandomnessSource::new(seed, 0);
                    let rows = evolve_logged(&mut f, &map_spec, &mut engine_spec, steps, &mut rng)
                        .map_err(invalid)?;
                    if let Some(path) = &state {
                        let history = history_of(&rows, &f);
                        let doc =
                            json!({ "fiq": FiqDocument::from(f.clone()), "history": history });
                        fs::write(path, pretty(&doc))
                            .with_context(|| format!("writing {}", path.display()))
                            .map_err(invalid)?;
                    }
                    emit_meta(out, &meta("evolve", seed, config, Some(&rng)))?;
                    let text = match format {
                        Format::Csv => {
                            let mut s = format!("{}\n", TrajectoryRow::CSV_HEADER);
                            for r in &rows {
                                s.push_str(&r.to_csv());
                                s.push('\n');
                            }
                            s
                        }
                        Format::Json => pretty(&rows),
                    };
                    write_output(out, &text)
                }
                Loaded::Exact(x) => {
                    if state.is_some() {
                        return Err(usage(anyhow!("--state applies to fiq inputs only")));
                    }
                    let traj = evolve_exact(&x, &map_spec, steps).map_err(invalid)?;
                    emit_meta(out, &meta("evolve", seed, config, None))?;
                    let per_step = match &map_spec {
                        MapSpec::Shift(m) => m.shift(),
                        MapSpec::Rotation(_) => 0,
                    };
                    let rows: Vec<(u64, String, String)> = traj
                        .states
                        .iter()
                        .enumerate()
                        .map(|(t, v)| {
                            let emitted = if t == 0 {
                                String::new()
                            } else {
                                bits(&traj.emitted[(t - 1) * per_step..t * per_step])
                            };
                            (t as u64, emitted, v.to_string())
                        })
                        .collect();
                    let text = match format {
                        Format::Csv => {
                            let mut s = String::from("step,emitted_bits,value\n");
                            for (t, e, v) in &rows {
                                s.push_str(&format!("{t},{e},{v}\n"));
                            }
                            s
                        }
                        Format::Json => pretty(
                            &rows
                                .iter()
                                .map(|(t, e, v)| json!({"step": t, "emitted_bits": e, "value": v}))
                                .collect::<Vec<_>>(),
                        ),
                    };
                    write_output(out, &text)
                }
            }
        }
        Command::Measure {
            input,
            resolution,
            take,
        } => {
            require_format(cli.format, &[Format::Json])?;
            let engine = MeasurementEngine::with_resolution(resolution)
                .ok_or_else(|| usage(anyhow!("--resolution must be positive")))?;
            let loaded = load(&input, take).map_err(usage)?;
            let config =
                json!({ "input": input, "resolution": resolution, "take": take, "format": "json" });
            match loaded {
                Loaded::Fiq(mut f) => {
                    let mut rng = RandomnessSource::new(seed, 0);
                    let reading = engine.measure(&mut f, &mut rng);
                    println!("{reading}");
                    emit_meta(out, &meta("measure", seed, config, Some(&rng)))?;
                    match out {
                        Some(path) => write_output(Some(path), &pretty(&f)),
                        None => Ok(()),
                    }
                }
                Loaded::Exact(x) => {
                    let digits = x.leading_digits(resolution as u64).map_err(invalid)?;
                    println!("{}", bits(&digits));
                    emit_meta(out, &meta("measure", seed, config, None))
                }
            }
        }
        Command::Experiment { name, config } => {
            require_format(cli.format, &[Format::Json, Format::Csv])?;
            let mut cfg = match (&config, &name) {
                (Some(path), _) => {
                    let text = fs::read_to_string(path)
                        .with_context(|| format!("reading {}", path.display()))
                        .map_err(usage)?;
                    ExperimentConfig::from_json(&text, name.as_deref()).map_err(usage)?
                }
                (None, Some(n)) => {
                    ExperimentConfig::new(ExperimentSpec::default_for(n).map_err(usage)?, 0)
                }
                (None, None) => return Err(usage(anyhow!("give --name or --config"))),
            };
            if let Some(s) = cli.seed {
                cfg.seed = s;
            }
            let run = run_experiment(&cfg).map_err(|e| match e {
                fiq_core::ExperimentError::Io(_) => invalid(e),
                _ => usage(e),
            })?;
            let meta_doc = json!({
                "command": "experiment",
                "version": CODE_VERSION,
                "seed": cfg.seed,
                "config": cfg,
                "lineage": run.summary.lineage,
            });
            match out {
                Some(dir) => {
                    let (results, summary) = run.write(dir).map_err(invalid)?;
                    emit_meta(Some(&dir.join(run.summary.experiment)), &meta_doc)?;
                    eprintln!("wrote {} and {}", results.display(), summary.display());
                }
                None => {
                    emit_meta(None, &meta_doc)?;
                    match cli.format.unwrap_or(Format::Json) {
                        Format::Json => print!("{}", run.summary_json()),
                        Format::Csv => print!("{}", run.results.to_csv()),
                    }
                }
            }
            if run.passed() {
                Ok(())
            } else {
                Err(Failure::Statistical)
            }
        }
        Command::Validate { file, history } => {
            require_format(cli.format, &[Format::Json])?;
            let text = fs::read_to_string(&file)
                .with_context(|| format!("reading {}", file.display()))
                .map_err(usage)?;
            let value: Value = serde_json::from_str(&text)
                .with_context(|| format!("parsing {}", file.display()))
                .map_err(usage)?;
            let (candidate, mut snapshots) = input::candidate(&value).map_err(usage)?;
            if let Some(path) = history {
                let text = fs::read_to_string(&path)
                    .with_context(|| format!("reading {}", path.display()))
                    .map_err(usage)?;
                snapshots = Some(serde_json::from_str::<Vec<Snapshot>>(&text).map_err(usage)?);
            }
            let report = validate(&candidate, snapshots.as_deref());
            emit_meta(
                out,
                &json!({
                    "command": "validate",
                    "version": CODE_VERSION,
                    "seed": seed,
                    "config": { "file": file, "history": snapshots.is_some(), "format": "json" },
                    "lineage": Value::Null,
                }),
            )?;
            write_output(out, &pretty(&report))?;
            if report.is_valid() {
                Ok(())
            } else {
                Err(Failure::Invalid(anyhow!(
                    "violated: {}",
                    report.violated().join("; ")
                )))
            }
        }
    }
}

fn require_format(given: Option<Format>, allowed: &[Format]) -> Result<(), Failure> {
    match given {
        Some(f) if !allowed.contains(&f) => {
            Err(usage(anyhow!("--format {f:?} is not supported here")))
        }
        _ => Ok(()),
    }
}

fn meta(command: &str, seed: u64, config: Value, rng: Option<&RandomnessSource>) -> Value {
    json!({
        "command": command,
        "version": CODE_VERSION,
        "seed": seed,
        "config": config,
        "lineage": rng.map(|r| r.lineage()),
    })
}

fn bits(b: &[bool]) -> String {
    b.iter().map(|&d| if d { '1' } else { '0' }).collect()
}

/// Snapshots in the absolute frame: every digit shifted out so far followed
/// by the current prefix. Only the final state's prefix is known exactly, so
/// each earlier snapshot records the digits emitted up to then.
fn history_of(rows: &[TrajectoryRow], last: &fiq_core::Fiq) -> Vec<Snapshot> {
    let mut emitted = String::new();
    let mut out = Vec::new();
    let start = last.clock() - (rows.len() as u64 - 1);
    for r in rows {
        emitted.push_str(&r.emitted_bits);
        out.push(Snapshot {
            clock: start + r.step,
            realized: emitted.clone(),
        });
    }
    let mut realized = emitted;
    realized.push_str(&bits(last.prefix()));
    out.push(Snapshot {
        clock: last.clock(),
        realized,
    });
    out
}

/// JSON for an exact quantity: its digits, known precision, expansion
/// metadata for rationals, and the frozen Fiq of its leading digits.
fn describe_exact(d: &ExactDomain, take: Option<u64>) -> anyhow::Result<Value> {
    let precision = d.known_precision();
    let take = match (take, precision) {
        (Some(t), _) => t,
        (None, Precision::Bounded(n)) => n,
        (None, Precision::Unbounded) => 32,
    };
    let digits = d.digits(take)?;
    let frozen = fiq_core::to_fiq(d, take)?;
    let (kind, extra) = match d {
        ExactDomain::Rational(r) => (
            "rational",
            json!({
                "value": fiq_core::ratio::format_rational(r.value()),
                "expansion": r.expansion_period(),
            }),
        ),
        ExactDomain::Truncated(t) => (
            "truncated",
            json!({ "value": fiq_core::ratio::format_rational(&t.value()), "cutoff": t.cutoff() }),
        ),
        ExactDomain::Computable(c) => ("computable", json!({ "generator": c.generator().name() })),
    };
    let mut doc = json!({
        "spec": d.to_string(),
        "kind": kind,
        "precision": match precision {
            Precision::Bounded(n) => json!(n),
            Precision::Unbounded => json!("unbounded"),
        },
        "digits": bits(&digits),
        "fiq": FiqDocument::from(frozen),
    });
    let obj = doc.as_object_mut().expect("object");
    for (k, v) in extra.as_object().expect("object") {
        obj.insert(k.clone(), v.clone());
    }
    Ok(doc)
}
