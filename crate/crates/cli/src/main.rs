//! `infppl`: run the example corpus under any observe semantics.

use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;
use std::str::FromStr;
use std::time::Instant;

use clap::{Args, Parser, Subcommand, ValueEnum};
use infppl::corpus::{self, Example};
use infppl::engine::{rejection_estimate, weighted_estimate, TrialRecord};
use infppl::{run_trials, EngineError, Estimate, InfNum, Mode, RunOptions};
use serde_json::{json, Value};

const EXIT_UNKNOWN_EXAMPLE: u8 = 2;
const EXIT_NO_ESTIMATE: u8 = 3;
const EXIT_BAD_FLAGS: u8 = 4;
const EXIT_IO: u8 = 1;

#[derive(Parser)]
#[command(name = "infppl", version, about = "Run interval-observe probabilistic programs from the example corpus")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Estimate the expectation of one example.
    Run {
        example: String,
        #[arg(long, default_value = "weighted")]
        mode: Mode,
        #[arg(long, default_value = "eps")]
        width: Width,
        #[command(flatten)]
        common: Common,
    },
    /// Run one example at several finite widths and at eps, with common random numbers.
    Sweep {
        example: String,
        #[arg(long, default_value = "weighted")]
        mode: Mode,
        /// Comma-separated positive widths.
        #[arg(long, value_delimiter = ',', default_value = "1,0.1,0.01,0.001")]
        widths: Vec<PositiveReal>,
        #[command(flatten)]
        common: Common,
    },
    /// Compare two examples under one mode, or one example under two modes.
    Compare {
        example_a: String,
        example_b: Option<String>,
        /// One mode, or two comma-separated modes when comparing a single example.
        #[arg(long, value_delimiter = ',', default_value = "weighted")]
        mode: Vec<Mode>,
        #[arg(long, default_value = "eps")]
        width: Width,
        #[command(flatten)]
        common: Common,
    },
    /// List the example corpus.
    List {
        #[arg(long, default_value = "csv")]
        format: Format,
        #[arg(long)]
        output: Option<PathBuf>,
    },
}

#[derive(Args)]
struct Common {
    #[arg(long, default_value_t = 100_000, value_parser = clap::value_parser!(u64).range(1..))]
    trials: u64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long)]
    format: Option<Format>,
    /// Write to this file instead of standard output.
    #[arg(long)]
    output: Option<PathBuf>,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Csv,
}

/// An observation width: a positive decimal or `eps` for `1ε`.
#[derive(Clone, Copy, Debug)]
struct Width(InfNum);

impl FromStr for Width {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        if s == "eps" {
            return Ok(Width(InfNum::EPS));
        }
        s.parse::<PositiveReal>().map(|p| Width(InfNum::from_real(p.0)))
    }
}

impl Width {
    fn label(&self) -> String {
        if self.0.is_infinitesimal() {
            "eps".to_string()
        } else {
            self.0.coeff().to_string()
        }
    }

    fn json(&self) -> Value {
        if self.0.is_infinitesimal() {
            json!("eps")
        } else {
            json!(self.0.coeff())
        }
    }
}

#[derive(Clone, Copy, Debug)]
struct PositiveReal(f64);

impl FromStr for PositiveReal {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        match s.trim().parse::<f64>() {
            Ok(v) if v > 0.0 && v.is_finite() => Ok(PositiveReal(v)),
            _ => Err(format!("'{s}' is not a positive decimal width")),
        }
    }
}

struct Failure {
    code: u8,
    message: String,
}

impl Failure {
    fn new(code: u8, message: impl Into<String>) -> Self {
        Failure { code, message: message.into() }
    }
}

impl From<EngineError> for Failure {
    fn from(e: EngineError) -> Self {
        let code = match e {
            EngineError::UndefinedEstimate { .. }
            | EngineError::NoAcceptedTrials { .. }
            | EngineError::InfinitesimalUnderRejection(_) => EXIT_NO_ESTIMATE,
            EngineError::ZeroTrials => EXIT_BAD_FLAGS,
            _ => EXIT_IO,
        };
        Failure::new(code, e.to_string())
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { ExitCode::from(EXIT_BAD_FLAGS) } else { ExitCode::SUCCESS };
        }
    };
    let started = Instant::now();
    let result = match cli.command {
        Command::Run { example, mode, width, common } => cmd_run(&example, mode, width, &common),
        Command::Sweep { example, mode, widths, common } => cmd_sweep(&example, mode, &widths, &common),
        Command::Compare { example_a, example_b, mode, width, common } => {
            cmd_compare(&example_a, example_b.as_deref(), &mode, width, &common)
        }
        Command::List { format, output } => write_output(output.as_ref(), &cmd_list(format)),
    };
    eprintln!("wall_ms: {}", started.elapsed().as_millis());
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("infppl: {}", f.message);
            ExitCode::from(f.code)
        }
    }
}

fn lookup(name: &str) -> Result<&'static Example, Failure> {
    corpus::get(name).map_err(|e| Failure::new(EXIT_UNKNOWN_EXAMPLE, e.to_string()))
}

fn write_output(path: Option<&PathBuf>, text: &str) -> Result<(), Failure> {
    let io = |e: std::io::Error| Failure::new(EXIT_IO, format!("writing output: {e}"));
    match path {
        Some(p) => std::fs::write(p, text).map_err(io),
        None => std::io::stdout().lock().write_all(text.as_bytes()).map_err(io),
    }
}

fn records(example: &Example, mode: Mode, width: InfNum, common: &Common) -> Result<Vec<TrialRecord>, EngineError> {
    run_trials(&example.at_width(width), mode, common.trials, common.seed, &RunOptions::default())
}

fn reduce(records: &[TrialRecord], mode: Mode, seed: u64) -> Result<Estimate, EngineError> {
    match mode {
        Mode::Weighted | Mode::Density => weighted_estimate(records, mode, seed),
        Mode::Rejection => rejection_estimate(records, seed),
    }
}

fn result_json(example: &str, width: Width, est: &Estimate) -> Value {
    json!({
        "example": example,
        "mode": est.mode.as_str(),
        "width": width.json(),
        "trials": est.trials,
        "seed": est.seed,
        "estimate": est.value,
        "min_order": est.min_order,
        "effective_trials": est.effective_trials,
        "std_error": est.std_error,
    })
}

const CSV_HEADER: [&str; 6] = ["width", "estimate", "trials", "seed", "min_order", "effective_trials"];

fn csv_text(rows: Vec<[String; 6]>) -> String {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(CSV_HEADER).expect("writing to memory");
    for row in rows {
        w.write_record(&row).expect("writing to memory");
    }
    String::from_utf8(w.into_inner().expect("flushing to memory")).expect("csv output is utf-8")
}

fn csv_row(width: &str, value: f64, trials: u64, seed: u64, min_order: Option<i32>, effective: Option<u64>) -> [String; 6] {
    let opt = |v: Option<String>| v.unwrap_or_default();
    [
        width.to_string(),
        if value.is_nan() { "NaN".to_string() } else { value.to_string() },
        trials.to_string(),
        seed.to_string(),
        opt(min_order.map(|o| o.to_string())),
        opt(effective.map(|e| e.to_string())),
    ]
}

fn cmd_run(name: &str, mode: Mode, width: Width, common: &Common) -> Result<(), Failure> {
    let example = lookup(name)?;
    let est = reduce(&records(example, mode, width.0, common)?, mode, common.seed)?;
    let text = match common.format.unwrap_or(Format::Json) {
        Format::Json => format!("{}\n", result_json(name, width, &est)),
        Format::Csv => csv_text(vec![csv_row(
            &width.label(),
            est.value,
            est.trials,
            est.seed,
            Some(est.min_order),
            Some(est.effective_trials),
        )]),
    };
    write_output(common.output.as_ref(), &text)
}

fn cmd_sweep(name: &str, mode: Mode, widths: &[PositiveReal], common: &Common) -> Result<(), Failure> {
    let example = lookup(name)?;
    let all: Vec<Width> = widths
        .iter()
        .map(|w| Width(InfNum::from_real(w.0)))
        .chain([Width(InfNum::EPS)])
        .collect();
    let mut rows = Vec::new();
    let mut objects = Vec::new();
    for width in all {
        let outcome = records(example, mode, width.0, common).and_then(|r| reduce(&r, mode, common.seed));
        // A width too small for the cdf difference, or eps under rejection,
        // yields a row without an estimate rather than aborting the sweep.
        let (value, min_order, effective, error) = match outcome {
            Ok(est) => (est.value, Some(est.min_order), Some(est.effective_trials), None),
            Err(EngineError::UndefinedEstimate { min_order, effective_trials }) => (
                f64::NAN,
                Some(min_order),
                Some(effective_trials),
                Some(EngineError::UndefinedEstimate { min_order, effective_trials }.to_string()),
            ),
            Err(e @ (EngineError::NoAcceptedTrials { .. } | EngineError::InfinitesimalUnderRejection(_))) => {
                (f64::NAN, None, None, Some(e.to_string()))
            }
            Err(e) => return Err(e.into()),
        };
        rows.push(csv_row(&width.label(), value, common.trials, common.seed, min_order, effective));
        objects.push(json!({
            "width": width.json(),
            "estimate": if value.is_nan() { Value::Null } else { json!(value) },
            "trials": common.trials,
            "seed": common.seed,
            "min_order": min_order,
            "effective_trials": effective,
            "error": error,
        }));
    }
    let text = match common.format.unwrap_or(Format::Csv) {
        Format::Csv => csv_text(rows),
        Format::Json => format!("{}\n", json!({ "example": name, "mode": mode.as_str(), "rows": objects })),
    };
    write_output(common.output.as_ref(), &text)
}

/// Largest relative difference between per-trial weight coefficients, and
/// the number of trials whose weights differ in ε-order.
fn weight_difference(a: &[TrialRecord], b: &[TrialRecord]) -> (f64, u64) {
    let mut max_rel: f64 = 0.0;
    let mut order_mismatches = 0;
    for (x, y) in a.iter().zip(b) {
        if x.weight.order() != y.weight.order() {
            order_mismatches += 1;
            continue;
        }
        let scale = x.weight.coeff().abs().max(y.weight.coeff().abs());
        if scale > 0.0 {
            max_rel = max_rel.max((x.weight.coeff() - y.weight.coeff()).abs() / scale);
        }
    }
    (max_rel, order_mismatches)
}

fn cmd_compare(a: &str, b: Option<&str>, modes: &[Mode], width: Width, common: &Common) -> Result<(), Failure> {
    let (name_b, mode_a, mode_b) = match (b, modes) {
        (Some(b), [m]) => (b, *m, *m),
        (None, [ma, mb]) => (a, *ma, *mb),
        (Some(_), _) => return Err(Failure::new(EXIT_BAD_FLAGS, "comparing two examples takes a single --mode")),
        (None, _) => return Err(Failure::new(EXIT_BAD_FLAGS, "comparing one example takes --mode A,B with two modes")),
    };
    let (ex_a, ex_b) = (lookup(a)?, lookup(name_b)?);
    let rec_a = records(ex_a, mode_a, width.0, common)?;
    let rec_b = records(ex_b, mode_b, width.0, common)?;
    let est_a = reduce(&rec_a, mode_a, common.seed)?;
    let est_b = reduce(&rec_b, mode_b, common.seed)?;
    let diff = est_b.value - est_a.value;
    let scale = est_a.value.abs().max(est_b.value.abs());
    let mut report = json!({
        "a": result_json(a, width, &est_a),
        "b": result_json(name_b, width, &est_b),
        "difference": diff,
        "relative_difference": if scale > 0.0 { diff.abs() / scale } else { 0.0 },
    });
    // Rejection trials carry no weights worth comparing.
    if mode_a != Mode::Rejection && mode_b != Mode::Rejection {
        let (max_rel, mismatches) = weight_difference(&rec_a, &rec_b);
        report["weight_max_rel_diff"] = json!(max_rel);
        report["weight_order_mismatches"] = json!(mismatches);
    }
    let text = match common.format.unwrap_or(Format::Json) {
        Format::Json => format!("{report}\n"),
        Format::Csv => {
            let mut w = csv::Writer::from_writer(Vec::new());
            let header = ["example", "mode", "estimate", "std_error", "min_order", "effective_trials"];
            w.write_record(header).expect("writing to memory");
            for (name, est) in [(a, &est_a), (name_b, &est_b)] {
                w.write_record([
                    name.to_string(),
                    est.mode.as_str().to_string(),
                    est.value.to_string(),
                    est.std_error.to_string(),
                    est.min_order.to_string(),
                    est.effective_trials.to_string(),
                ])
                .expect("writing to memory");
            }
            String::from_utf8(w.into_inner().expect("flushing to memory")).expect("csv output is utf-8")
        }
    };
    write_output(common.output.as_ref(), &text)
}

fn cmd_list(format: Format) -> String {
    let examples = corpus::list_examples();
    match format {
        Format::Json => {
            let items: Vec<Value> = examples
                .iter()
                .map(|e| {
                    json!({
                        "name": e.name(),
                        "description": e.description(),
                        "exact_value": e.exact_value().map(|v| v.value),
                    })
                })
                .collect();
            format!("{}\n", Value::Array(items))
        }
        Format::Csv => {
            let mut w = csv::Writer::from_writer(Vec::new());
            w.write_record(["name", "description", "exact_value"]).expect("writing to memory");
            for e in examples {
                let exact = e.exact_value().map(|v| v.value.to_string()).unwrap_or_default();
                w.write_record([e.name(), e.description(), &exact]).expect("writing to memory");
            }
            String::from_utf8(w.into_inner().expect("flushing to memory")).expect("csv output is utf-8")
        }
    }
}
