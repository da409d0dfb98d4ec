//! Command-line surface. Every command returns a [`CommandResult`]; the
//! binary only prints it. Machine output goes to stdout, diagnostics to
//! stderr.
//!
//! Numbers are printed with 12 significant digits. JSON keys are
//! snake_case; see `docs/formats.md`.

use std::collections::HashSet;

use clap::{Parser, Subcommand, ValueEnum};
use serde::Serialize;
use serde_json::{json, Map, Value};

use crate::error::Error;
use crate::linalg::{kron, ComplexMatrix};
use crate::photon::min_error_table;
use crate::rate::{
    h3_unchecked, in_triangle, keyrate, region_map, tangent_at_b, tangent_envelope, threshold,
    ErrorPoint, Protocol, RegionParams, TOL_BISECT, VERTEX_LOW, VERTEX_RIGHT, VERTEX_TOP,
};
use crate::squash::{construct_squash_y_with, reference_y, SquashMethod, SquashOptions};
use crate::states::{basis_projector, threshold_povm, BasisAxis, BitValue, PhotonNumber, N_MAX};
use crate::symmetry::{build_projectors, ErrorModel};
use crate::verify::{run_verify, Suite, VerifyOptions, DEFAULT_SEED, NEGLECT_BOUND};

pub const EXIT_OK: i32 = 0;
pub const EXIT_CHECK_FAILED: i32 = 1;
pub const EXIT_USAGE: i32 = 2;

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum OutputFormat {
    Csv,
    Json,
}

#[derive(Clone, Debug, PartialEq)]
pub struct CommandResult {
    pub exit_code: i32,
    /// Structured report, when the command got that far.
    pub payload: Option<Value>,
    pub stdout: String,
    pub stderr: String,
}

impl CommandResult {
    fn usage(msg: impl Into<String>) -> Self {
        let mut stderr = msg.into();
        if !stderr.ends_with('\n') {
            stderr.push('\n');
        }
        Self {
            exit_code: EXIT_USAGE,
            payload: None,
            stdout: String::new(),
            stderr,
        }
    }

    fn failure(msg: impl Into<String>) -> Self {
        Self {
            exit_code: EXIT_CHECK_FAILED,
            ..Self::usage(msg)
        }
    }
}

#[derive(Parser, Debug)]
#[command(name = "sixstate", version, about = "Six-state QKD with threshold detectors")]
pub struct Cli {
    /// Seed for randomized steps (squash start point, click sampling).
    #[arg(long, global = true, default_value_t = DEFAULT_SEED)]
    pub seed: u64,
    /// Output format; tables default to csv, reports to json.
    #[arg(long, global = true, value_enum)]
    pub format: Option<OutputFormat>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Bit error rate where the key rate vanishes.
    Threshold {
        #[arg(long)]
        protocol: Protocol,
    },
    /// Key rate rows (e_b, hzx_upper, rate) over a grid of bit error rates.
    Keyrate {
        #[arg(long, default_value_t = 0.0)]
        min: f64,
        #[arg(long, default_value_t = 0.25)]
        max: f64,
        #[arg(long, default_value_t = 0.005)]
        step: f64,
        #[arg(long = "n-sif", default_value_t = 1.0)]
        n_sif: f64,
    },
    /// Sampled (e_b, e_y, h3) points of the 3-photon error region.
    Region {
        #[arg(long, default_value_t = 20)]
        grid: usize,
    },
    /// Minimum bit error per photon number.
    Minerr {
        #[arg(long, default_value_t = N_MAX)]
        nmax: usize,
    },
    /// Squash construction diagnostics.
    Squash,
    /// Tangent points and the envelope line.
    Envelope,
    /// Run the invariant suite.
    Verify {
        #[arg(long, default_value = "all")]
        suite: Suite,
        /// Perturb one projector entry (failure-path test hook).
        #[arg(long, hide = true)]
        perturb_projector: Option<f64>,
    },
}

/// `%.12g`: 12 significant digits, trailing zeros removed, exponent form
/// outside [1e-4, 1e12).
pub fn format_number(x: f64) -> String {
    if x == 0.0 {
        return "0".to_string();
    }
    if !x.is_finite() {
        return if x.is_nan() {
            "nan".into()
        } else if x > 0.0 {
            "inf".into()
        } else {
            "-inf".into()
        };
    }
    let sci = format!("{:.11e}", x);
    let (mantissa, exp) = sci.split_once('e').expect("exponent form");
    let exp: i32 = exp.parse().expect("integer exponent");
    if (-4..12).contains(&exp) {
        let decimals = (11 - exp).max(0) as usize;
        trim_zeros(format!("{:.*}", decimals, x))
    } else {
        let m = trim_zeros(mantissa.to_string());
        let sign = if exp < 0 { '-' } else { '+' };
        format!("{m}e{sign}{:02}", exp.abs())
    }
}

fn trim_zeros(s: String) -> String {
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.').to_string()
    } else {
        s
    }
}

fn round12(x: f64) -> f64 {
    if x.is_finite() {
        format_number(x).parse().unwrap_or(x)
    } else {
        x
    }
}

/// Rounds every float in a JSON value to 12 significant digits.
fn round_json(v: Value) -> Value {
    match v {
        Value::Number(n) if n.is_f64() => {
            let x = round12(n.as_f64().expect("f64"));
            serde_json::Number::from_f64(x).map_or(Value::Null, Value::Number)
        }
        Value::Array(items) => Value::Array(items.into_iter().map(round_json).collect()),
        Value::Object(map) => Value::Object(map.into_iter().map(|(k, v)| (k, round_json(v))).collect()),
        other => other,
    }
}

#[derive(Clone, Debug)]
enum Cell {
    Num(f64),
    Int(i64),
    Bool(bool),
    Text(String),
}

impl Cell {
    fn csv(&self) -> String {
        match self {
            Cell::Num(x) => format_number(*x),
            Cell::Int(i) => i.to_string(),
            Cell::Bool(b) => b.to_string(),
            Cell::Text(s) => s.clone(),
        }
    }

    fn json(&self) -> Value {
        match self {
            Cell::Num(x) => json!(x),
            Cell::Int(i) => json!(i),
            Cell::Bool(b) => json!(b),
            Cell::Text(s) => json!(s),
        }
    }
}

struct Table {
    columns: Vec<&'static str>,
    rows: Vec<Vec<Cell>>,
}

impl Table {
    fn to_csv(&self) -> String {
        let mut w = csv::WriterBuilder::new()
            .terminator(csv::Terminator::Any(b'\n'))
            .from_writer(Vec::new());
        w.write_record(&self.columns).expect("in-memory write");
        for row in &self.rows {
            w.write_record(row.iter().map(Cell::csv)).expect("in-memory write");
        }
        String::from_utf8(w.into_inner().expect("flush")).expect("utf-8")
    }

    fn to_json(&self) -> Value {
        Value::Array(
            self.rows
                .iter()
                .map(|row| {
                    let obj: Map<String, Value> = self
                        .columns
                        .iter()
                        .zip(row)
                        .map(|(k, c)| (k.to_string(), c.json()))
                        .collect();
                    Value::Object(obj)
                })
                .collect(),
        )
    }

    /// One-row table from a flat JSON object.
    fn from_record(keys: &[&'static str], v: &Value) -> Self {
        let row = keys
            .iter()
            .map(|k| match &v[*k] {
                Value::Number(n) if n.is_f64() => Cell::Num(n.as_f64().expect("f64")),
                Value::Number(n) => Cell::Int(n.as_i64().unwrap_or_default()),
                Value::Bool(b) => Cell::Bool(*b),
                Value::String(s) => Cell::Text(s.clone()),
                Value::Null => Cell::Text(String::new()),
                other => Cell::Text(other.to_string()),
            })
            .collect();
        Table {
            columns: keys.to_vec(),
            rows: vec![row],
        }
    }
}

fn render_json(v: &Value) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("serializable");
    s.push('\n');
    s
}

fn emit(payload: Value, table: &Table, format: OutputFormat, exit_code: i32) -> CommandResult {
    let payload = round_json(payload);
    let stdout = match format {
        OutputFormat::Json => render_json(&payload),
        OutputFormat::Csv => table.to_csv(),
    };
    CommandResult {
        exit_code,
        payload: Some(payload),
        stdout,
        stderr: String::new(),
    }
}

fn emit_table(table: Table, format: OutputFormat) -> CommandResult {
    let payload = table.to_json();
    emit(payload, &table, format, EXIT_OK)
}

fn lib_failure(e: Error) -> CommandResult {
    match e {
        Error::DomainError { .. } | Error::BadPhotonNumber { .. } => CommandResult::usage(format!("error: {e}")),
        other => CommandResult::failure(format!("error: {other}")),
    }
}

pub fn cmd_threshold(protocol: Protocol, format: OutputFormat) -> CommandResult {
    let value = match threshold(protocol) {
        Ok(v) => v,
        Err(e) => return lib_failure(e),
    };
    let payload = json!({
        "protocol": protocol.as_str(),
        "threshold": value,
        "tolerance": TOL_BISECT,
    });
    let table = Table::from_record(&["protocol", "threshold", "tolerance"], &round_json(payload.clone()));
    emit(payload, &table, format, EXIT_OK)
}

pub fn cmd_keyrate(min: f64, max: f64, step: f64, n_sif: f64, format: OutputFormat) -> CommandResult {
    if !(min.is_finite() && max.is_finite() && 0.0 <= min && min < max && max <= 0.25) {
        return CommandResult::usage(format!("error: need 0 <= min < max <= 0.25 (got min {min}, max {max})"));
    }
    if !(step.is_finite() && step > 0.0) {
        return CommandResult::usage(format!("error: step must be positive (got {step})"));
    }
    if !(n_sif.is_finite() && n_sif >= 0.0) {
        return CommandResult::usage(format!("error: n-sif must be non-negative (got {n_sif})"));
    }
    let count = ((max - min) / step + 1e-9).floor() as usize;
    if count > 10_000_000 {
        return CommandResult::usage("error: grid too fine (more than 1e7 rows)");
    }
    let env = match tangent_envelope() {
        Ok(e) => e,
        Err(e) => return lib_failure(e),
    };
    let mut rows = Vec::with_capacity(count + 1);
    for i in 0..=count {
        let e_b = (min + i as f64 * step).min(max);
        match keyrate(e_b, &env, n_sif) {
            Ok(r) => rows.push(vec![Cell::Num(r.e_b), Cell::Num(r.hzx_upper), Cell::Num(r.rate)]),
            Err(e) => return lib_failure(e),
        }
    }
    emit_table(
        Table {
            columns: vec!["e_b", "hzx_upper", "rate"],
            rows,
        },
        format,
    )
}

pub fn cmd_region(grid: usize, format: OutputFormat) -> CommandResult {
    if !(2..=10_000).contains(&grid) {
        return CommandResult::usage(format!("error: grid must be in [2, 10000] (got {grid})"));
    }
    let sq = match construct_squash_y_with(&SquashOptions::default()) {
        Ok(s) => s,
        Err(e) => return lib_failure(e),
    };
    let model = ErrorModel::new(&sq);
    let mut seen = HashSet::new();
    let mut rows = Vec::new();
    let mut push = |pt: ErrorPoint, rows: &mut Vec<Vec<Cell>>| -> bool {
        let key = (format_number(pt.e_b), format_number(pt.e_y));
        if seen.insert(key) {
            rows.push(vec![
                Cell::Num(pt.e_b),
                Cell::Num(pt.e_y),
                Cell::Num(h3_unchecked(pt.e_b, pt.e_y)),
            ]);
        }
        in_triangle(&pt, 1e-12)
    };
    for v in [VERTEX_LOW, VERTEX_TOP, VERTEX_RIGHT] {
        push(v, &mut rows);
    }
    for i in 0..grid {
        let t = i as f64 / (grid - 1) as f64;
        for j in 0..grid {
            let s = -1.0 + 2.0 * j as f64 / (grid - 1) as f64;
            let pt = match RegionParams::new(1.0, t, s).and_then(|p| region_map(&p, &model)) {
                Ok(pt) => pt,
                Err(e) => return lib_failure(e),
            };
            if !push(pt, &mut rows) {
                return CommandResult::failure(format!(
                    "error: point ({}, {}) from t = {t}, s = {s} is outside the triangle",
                    pt.e_b, pt.e_y
                ));
            }
        }
    }
    emit_table(
        Table {
            columns: vec!["e_b", "e_y", "h3"],
            rows,
        },
        format,
    )
}

pub fn cmd_minerr(nmax: usize, format: OutputFormat) -> CommandResult {
    let n = match PhotonNumber::new(nmax) {
        Ok(n) => n,
        Err(e) => return CommandResult::usage(format!("error: {e}")),
    };
    let rows = match min_error_table(n) {
        Ok(r) => r,
        Err(e) => return lib_failure(e),
    };
    let rows = rows
        .iter()
        .map(|r| {
            vec![
                Cell::Int(r.n.get() as i64),
                Cell::Num(r.min_e_b.max(0.0)),
                Cell::Bool(r.min_e_b > NEGLECT_BOUND),
            ]
        })
        .collect();
    emit_table(
        Table {
            columns: vec!["n", "min_e_b", "exceeds_0_25677"],
            rows,
        },
        format,
    )
}

pub fn cmd_squash(seed: u64, format: OutputFormat) -> CommandResult {
    let sq = match construct_squash_y_with(&SquashOptions { seed: Some(seed) }) {
        Ok(s) => s,
        Err(e) => return lib_failure(e),
    };
    let p = build_projectors();
    let sy_y = kron(&BasisAxis::Y.pauli(), &sq.y_op);
    let traces: Vec<f64> = [&p.p0, &p.p1, &p.p2]
        .iter()
        .map(|pi| sy_y.trace_product(pi).re)
        .collect();
    let n3 = PhotonNumber::new(3).expect("3 photons");
    let mut povm = 0.0_f64;
    for axis in [BasisAxis::X, BasisAxis::Z] {
        for bit in BitValue::ALL {
            povm = povm.max(sq.apply(&basis_projector(axis, bit)).max_abs_diff(&threshold_povm(axis, bit, n3)));
        }
    }
    let unital = sq.apply(&ComplexMatrix::identity(2)).max_abs_diff(&ComplexMatrix::identity(8));
    let (method, iterations) = match sq.method {
        SquashMethod::Ansatz => ("ansatz", 0),
        SquashMethod::Dykstra { iterations } => ("dykstra", iterations),
    };
    let valid = sq.is_valid() && povm <= 1e-9;
    let payload = json!({
        "seed": seed,
        "method": method,
        "iterations": iterations,
        "lambda": sq.lambda_ansatz,
        "ansatz_residual": sq.ansatz_residual,
        "choi_min_eig": sq.choi_min_eig,
        "constraint_residual": sq.constraint_residual,
        "trace_p0": traces[0],
        "trace_p1": traces[1],
        "trace_p2": traces[2],
        "povm_residual": povm,
        "unital_residual": unital,
        "distance_to_reference": sq.y_op.max_abs_diff(&reference_y()),
        "kraus_count": sq.kraus.as_ref().map_or(0, Vec::len),
        "valid": valid,
    });
    let keys = [
        "seed",
        "method",
        "iterations",
        "lambda",
        "ansatz_residual",
        "choi_min_eig",
        "constraint_residual",
        "trace_p0",
        "trace_p1",
        "trace_p2",
        "povm_residual",
        "unital_residual",
        "distance_to_reference",
        "kraus_count",
        "valid",
    ];
    let table = Table::from_record(&keys, &round_json(payload.clone()));
    emit(payload, &table, format, if valid { EXIT_OK } else { EXIT_CHECK_FAILED })
}

pub fn cmd_envelope(format: OutputFormat) -> CommandResult {
    let (env, tb) = match tangent_envelope().and_then(|e| Ok((e, tangent_at_b()?))) {
        Ok(x) => x,
        Err(e) => return lib_failure(e),
    };
    let payload = json!({
        "e_d": env.e_d,
        "h12_e_d": env.h_at_d,
        "slope": env.slope,
        "intercept": env.intercept,
        "v3": env.v3,
        "e_b": tb.e_b,
        "h_e_b": tb.h_at_b,
        "one_minus_h_e_b": tb.one_minus_h_at_b,
        "e_c": env.neglect_edge,
        "e_c_b_tangent": tb.e_c,
        "b_tangent_slope": tb.slope,
        "b_tangent_intercept": tb.intercept,
    });
    let keys = [
        "e_d",
        "h12_e_d",
        "slope",
        "intercept",
        "v3",
        "e_b",
        "h_e_b",
        "one_minus_h_e_b",
        "e_c",
        "e_c_b_tangent",
        "b_tangent_slope",
        "b_tangent_intercept",
    ];
    let table = Table::from_record(&keys, &round_json(payload.clone()));
    emit(payload, &table, format, EXIT_OK)
}

pub fn cmd_verify(opts: &VerifyOptions, format: OutputFormat) -> CommandResult {
    let report = match run_verify(opts) {
        Ok(r) => r,
        Err(e) => return CommandResult::failure(format!("error: verification aborted: {e}")),
    };
    let payload = serde_json::to_value(&report).expect("serializable");
    let table = Table {
        columns: vec!["name", "passed", "residual", "tolerance"],
        rows: report
            .checks
            .iter()
            .map(|c| {
                vec![
                    Cell::Text(c.name.to_string()),
                    Cell::Bool(c.passed),
                    Cell::Num(c.residual),
                    Cell::Num(c.tolerance),
                ]
            })
            .collect(),
    };
    let code = if report.passed { EXIT_OK } else { EXIT_CHECK_FAILED };
    let mut out = emit(payload, &table, format, code);
    for c in report.failures() {
        out.stderr.push_str(&format!(
            "FAILED {}: residual {} exceeds tolerance {}\n",
            c.name,
            format_number(c.residual),
            format_number(c.tolerance)
        ));
    }
    out
}

pub fn execute(cli: &Cli) -> CommandResult {
    let table_format = cli.format.unwrap_or(OutputFormat::Csv);
    let report_format = cli.format.unwrap_or(OutputFormat::Json);
    match &cli.command {
        Command::Threshold { protocol } => cmd_threshold(*protocol, report_format),
        Command::Keyrate { min, max, step, n_sif } => cmd_keyrate(*min, *max, *step, *n_sif, table_format),
        Command::Region { grid } => cmd_region(*grid, table_format),
        Command::Minerr { nmax } => cmd_minerr(*nmax, table_format),
        Command::Squash => cmd_squash(cli.seed, report_format),
        Command::Envelope => cmd_envelope(report_format),
        Command::Verify {
            suite,
            perturb_projector,
        } => cmd_verify(
            &VerifyOptions {
                suite: *suite,
                seed: cli.seed,
                projector_perturbation: *perturb_projector,
            },
            report_format,
        ),
    }
}

/// Parses `args` (including the program name) and runs the command.
pub fn run<I, T>(args: I) -> CommandResult
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    match Cli::try_parse_from(args) {
        Ok(cli) => execute(&cli),
        Err(e) => {
            let text = e.render().to_string();
            match e.kind() {
                clap::error::ErrorKind::DisplayHelp | clap::error::ErrorKind::DisplayVersion => CommandResult {
                    exit_code: EXIT_OK,
                    payload: None,
                    stdout: text,
                    stderr: String::new(),
                },
                _ => CommandResult::usage(text),
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn number_formatting() {
        assert_eq!(format_number(0.0), "0");
        assert_eq!(format_number(1.0), "1");
        assert_eq!(format_number(0.25), "0.25");
        assert_eq!(format_number(1.0 / 3.0), "0.333333333333");
        assert_eq!(format_number(-2.5e-7), "-2.5e-07");
        assert_eq!(format_number(123456.789), "123456.789");
        assert_eq!(format_number(1e15), "1e+15");
        assert_eq!(format_number(-8.14494560473e-5), "-8.14494560473e-05");
        assert_eq!(format_number(0.000123), "0.000123");
        assert_eq!(format_number(0.126111633812345), "0.126111633812");
    }

    #[test]
    fn csv_uses_lf() {
        let r = cmd_keyrate(0.0, 0.01, 0.005, 1.0, OutputFormat::Csv);
        assert_eq!(r.exit_code, 0);
        assert!(r.stdout.starts_with("e_b,hzx_upper,rate\n"));
        assert!(!r.stdout.contains('\r'));
        assert_eq!(r.stdout.lines().count(), 4);
    }

    #[test]
    fn usage_errors() {
        assert_eq!(run(["sixstate", "threshold", "--protocol", "nonsense"]).exit_code, 2);
        assert_eq!(run(["sixstate", "keyrate", "--min", "0.2", "--max", "0.1"]).exit_code, 2);
        assert_eq!(run(["sixstate", "region", "--grid", "1"]).exit_code, 2);
        assert_eq!(run(["sixstate", "minerr", "--nmax", "0"]).exit_code, 2);
        assert_eq!(run(["sixstate", "verify", "--suite", "slow"]).exit_code, 2);
        assert_eq!(run(["sixstate", "bogus"]).exit_code, 2);
    }

    #[test]
    fn threshold_payload() {
        let r = run(["sixstate", "threshold", "--protocol", "bb84"]);
        assert_eq!(r.exit_code, 0);
        let v: Value = serde_json::from_str(&r.stdout).unwrap();
        assert!((v["threshold"].as_f64().unwrap() - 0.110028).abs() < 1e-4);
        assert_eq!(v["protocol"], "bb84");
    }

    #[test]
    fn region_grid_two_gives_vertices() {
        let r = cmd_region(2, OutputFormat::Csv);
        assert_eq!(r.exit_code, 0);
        let lines: Vec<&str> = r.stdout.lines().collect();
        assert_eq!(lines[0], "e_b,e_y,h3");
        assert!(lines[1].starts_with("0.25,0.333333333333,"));
        assert_eq!(lines.len(), 4);
    }
}
