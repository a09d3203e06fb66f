//! Command-line front end.
//!
//! Every command writes one table to stdout (or `--output`) as CSV or JSON
//! lines. Numbers carry 12 significant digits. Exit codes: 0 on success,
//! 1 when a verification suite fails, 2 on usage or parameter errors.

use std::ffi::OsString;
use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::{Map, Number, Value};

use crate::ensemble::DEFAULT_SEED;
use crate::error::Error;
use crate::qubit::{classify_regime, orientation_sweep, z_opt, RegimeThresholds};
use crate::search::grid;
use crate::states::{DensityOperator, Functional};
use crate::strength::{grid_search_max, max_delta_in};
use crate::verify::{run_suite, Suite, SuiteReport, VerifyConfig};

pub const EXIT_OK: i32 = 0;
pub const EXIT_VERIFY_FAILED: i32 = 1;
pub const EXIT_USAGE: i32 = 2;

/// Significant digits in numeric output.
pub const SIG_DIGITS: usize = 12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Csv,
    Jsonl,
}

#[derive(Debug, Parser)]
#[command(
    name = "povm-tradeoff",
    version,
    about = "Information gain versus disturbance for quantum measurements"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,

    /// Output format.
    #[arg(long, value_enum, default_value = "csv", global = true)]
    pub format: Format,

    /// Write the table here instead of stdout.
    #[arg(long, global = true)]
    pub output: Option<PathBuf>,

    /// Random seed (decimal or 0x-prefixed hex).
    #[arg(long, env = "POVM_TRADEOFF_SEED", default_value_t = DEFAULT_SEED, value_parser = parse_seed, global = true)]
    pub seed: u64,

    /// Worker threads for sampling commands.
    #[arg(long, global = true)]
    pub threads: Option<usize>,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Gain and disturbance of a qubit measurement across orientations z.
    Curve(CurveArgs),
    /// Run seeded verification suites.
    Verify(VerifyArgs),
    /// Locate the alpha ranges without a tradeoff.
    Classify(ClassifyArgs),
    /// Maximum gain at fixed measurement strength.
    Strength(StrengthArgs),
    /// Evaluate a knowledge functional.
    Entropy(EntropyArgs),
}

#[derive(Debug, Args)]
pub struct CurveArgs {
    #[arg(long, allow_negative_numbers = true)]
    pub a: f64,
    #[arg(long, allow_negative_numbers = true)]
    pub b: f64,
    #[arg(long, allow_negative_numbers = true)]
    pub alpha: f64,
    /// Number of z points.
    #[arg(long, default_value_t = 101)]
    pub n: usize,
}

#[derive(Debug, Args)]
pub struct VerifyArgs {
    /// Suite to run; repeat for several. Defaults to all.
    #[arg(long, value_parser = parse_suite)]
    pub suite: Vec<Suite>,
    #[arg(long, default_value_t = 10_000)]
    pub samples: u64,
    /// Comma-separated Hilbert-space dimensions.
    #[arg(long, value_delimiter = ',', default_value = "2,3,4")]
    pub dims: Vec<usize>,
}

#[derive(Debug, Args)]
pub struct ClassifyArgs {
    #[arg(long, allow_negative_numbers = true)]
    pub a: f64,
    #[arg(long, allow_negative_numbers = true)]
    pub b: f64,
    /// Number of alpha samples in the per-alpha table.
    #[arg(long, default_value_t = 21)]
    pub points: usize,
}

#[derive(Debug, Args)]
pub struct StrengthArgs {
    #[arg(long, allow_negative_numbers = true)]
    pub k: f64,
    #[arg(long, allow_negative_numbers = true)]
    pub a: f64,
    /// Grid points per axis for the numerical maximization.
    #[arg(long, default_value_t = 2001)]
    pub grid: usize,
}

#[derive(Debug, Args)]
#[group(required = true, multiple = false)]
pub struct StateSpec {
    /// Comma-separated eigenvalues.
    #[arg(long, value_delimiter = ',', allow_negative_numbers = true)]
    pub spectrum: Option<Vec<f64>>,
    /// Bloch-vector modulus of a qubit state.
    #[arg(long, allow_negative_numbers = true)]
    pub a: Option<f64>,
}

#[derive(Debug, Args)]
pub struct EntropyArgs {
    #[command(flatten)]
    pub state: StateSpec,
    /// One of P, S, Q, Hbar.
    #[arg(long, value_parser = parse_functional)]
    pub measure: Functional,
}

fn parse_seed(s: &str) -> Result<u64, String> {
    let t = s.trim();
    let parsed = match t.strip_prefix("0x").or_else(|| t.strip_prefix("0X")) {
        Some(hex) => u64::from_str_radix(hex, 16),
        None => t.parse(),
    };
    parsed.map_err(|_| format!("invalid seed '{s}'"))
}

fn parse_suite(s: &str) -> Result<Suite, String> {
    s.parse()
}

fn parse_functional(s: &str) -> Result<Functional, String> {
    s.parse::<Functional>().map_err(|e| e.to_string())
}

/// `%.12g`-style formatting with a `.` decimal separator.
pub fn format_number(x: f64) -> String {
    if x.is_nan() {
        return "nan".into();
    }
    if x.is_infinite() {
        return if x > 0.0 { "inf".into() } else { "-inf".into() };
    }
    if x == 0.0 {
        return "0".into();
    }
    let sci = format!("{:.*e}", SIG_DIGITS - 1, x);
    let (mantissa, exp) = sci.split_once('e').expect("exponent present");
    let exp: i32 = exp.parse().expect("integer exponent");
    if exp < -5 || exp >= SIG_DIGITS as i32 {
        format!(
            "{}e{}{:02}",
            trim_zeros(mantissa),
            if exp < 0 { '-' } else { '+' },
            exp.abs()
        )
    } else {
        let decimals = (SIG_DIGITS as i32 - 1 - exp).max(0) as usize;
        trim_zeros(&format!("{x:.decimals$}")).to_string()
    }
}

fn trim_zeros(s: &str) -> &str {
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.')
    } else {
        s
    }
}

/// A table cell.
#[derive(Debug, Clone, PartialEq)]
pub enum Cell {
    Num(f64),
    Int(u64),
    Bool(bool),
    Text(String),
    Missing,
}

impl Cell {
    fn csv(&self) -> String {
        match self {
            Cell::Num(x) => format_number(*x),
            Cell::Int(n) => n.to_string(),
            Cell::Bool(b) => b.to_string(),
            Cell::Text(s) => s.replace([',', '\n'], " "),
            Cell::Missing => String::new(),
        }
    }

    fn json(&self) -> Value {
        match self {
            Cell::Num(x) => format_number(*x)
                .parse::<f64>()
                .ok()
                .and_then(Number::from_f64)
                .map_or(Value::Null, Value::Number),
            Cell::Int(n) => Value::from(*n),
            Cell::Bool(b) => Value::Bool(*b),
            Cell::Text(s) => Value::String(s.clone()),
            Cell::Missing => Value::Null,
        }
    }
}

impl From<Option<f64>> for Cell {
    fn from(v: Option<f64>) -> Self {
        v.map_or(Cell::Missing, Cell::Num)
    }
}

/// Named columns plus rows.
#[derive(Debug, Clone, PartialEq)]
pub struct Table {
    pub header: Vec<&'static str>,
    pub rows: Vec<Vec<Cell>>,
}

impl Table {
    pub fn new(header: Vec<&'static str>) -> Self {
        Self {
            header,
            rows: Vec::new(),
        }
    }

    pub fn push(&mut self, row: Vec<Cell>) {
        debug_assert_eq!(row.len(), self.header.len());
        self.rows.push(row);
    }

    pub fn write(&self, format: Format, out: &mut dyn Write) -> io::Result<()> {
        match format {
            Format::Csv => {
                writeln!(out, "{}", self.header.join(","))?;
                for row in &self.rows {
                    let cells: Vec<String> = row.iter().map(Cell::csv).collect();
                    writeln!(out, "{}", cells.join(","))?;
                }
            }
            Format::Jsonl => {
                for row in &self.rows {
                    let obj: Map<String, Value> = self
                        .header
                        .iter()
                        .zip(row)
                        .map(|(h, c)| (h.to_string(), c.json()))
                        .collect();
                    writeln!(out, "{}", Value::Object(obj))?;
                }
            }
        }
        Ok(())
    }
}

/// What a command produced.
#[derive(Debug, Clone, PartialEq)]
pub struct Report {
    pub tables: Vec<Table>,
    pub diagnostics: Vec<String>,
    pub exit_code: i32,
}

impl Report {
    fn single(table: Table) -> Self {
        Self {
            tables: vec![table],
            diagnostics: Vec::new(),
            exit_code: EXIT_OK,
        }
    }

    /// Tables are separated by a blank line in CSV.
    pub fn write(&self, format: Format, out: &mut dyn Write) -> io::Result<()> {
        for (i, t) in self.tables.iter().enumerate() {
            if i > 0 && format == Format::Csv {
                writeln!(out)?;
            }
            t.write(format, out)?;
        }
        Ok(())
    }
}

pub fn cmd_curve(args: &CurveArgs) -> Result<Report, Error> {
    let points = orientation_sweep(args.a, args.b, args.alpha, args.n)?;
    let mut t = Table::new(vec!["z", "delta_in", "delta_out"]);
    for p in points {
        t.push(vec![
            Cell::Num(p.z),
            Cell::Num(p.delta_in),
            Cell::Num(p.delta_out),
        ]);
    }
    Ok(Report::single(t))
}

fn suite_row(r: &SuiteReport) -> Vec<Cell> {
    vec![
        Cell::Text(r.suite.to_string()),
        Cell::Int(r.seed),
        Cell::Int(r.samples),
        Cell::Int(r.passed),
        Cell::Int(r.failed),
        Cell::Num(r.max_violation),
        Cell::Num(r.tolerance),
        r.first_failure.map_or(Cell::Missing, Cell::Int),
    ]
}

pub fn cmd_verify(args: &VerifyArgs, seed: u64, threads: Option<usize>) -> Result<Report, Error> {
    let suites = if args.suite.is_empty() {
        Suite::ALL.to_vec()
    } else {
        args.suite.clone()
    };
    let mut t = Table::new(vec![
        "suite",
        "seed",
        "samples",
        "passed",
        "failed",
        "max_violation",
        "tolerance",
        "first_failure",
    ]);
    let mut diagnostics = Vec::new();
    for suite in suites {
        let r = run_suite(&VerifyConfig {
            suite,
            samples: args.samples,
            seed,
            dims: args.dims.clone(),
            threads,
        })?;
        if let Some(i) = r.first_failure {
            let detail = r
                .first_error
                .as_deref()
                .map(|e| format!(": {e}"))
                .unwrap_or_default();
            diagnostics.push(format!(
                "suite {suite} failed {} of {} (replay with --seed {seed}, instance {i}){detail}",
                r.failed, r.samples
            ));
        }
        t.push(suite_row(&r));
    }
    let exit_code = if diagnostics.is_empty() {
        EXIT_OK
    } else {
        EXIT_VERIFY_FAILED
    };
    Ok(Report {
        tables: vec![t],
        diagnostics,
        exit_code,
    })
}

fn regime_summary(t: &RegimeThresholds) -> Table {
    let mut table = Table::new(vec![
        "a",
        "b",
        "alpha_lo",
        "alpha_hi",
        "alpha_cap",
        "closed_alpha_plus",
        "closed_alpha_minus",
        "discrepancy",
    ]);
    table.push(vec![
        Cell::Num(t.a),
        Cell::Num(t.b),
        Cell::Num(t.alpha_lo),
        Cell::Num(t.alpha_hi),
        Cell::Num(t.alpha_cap),
        t.closed_alpha_plus.into(),
        t.closed_alpha_minus.into(),
        Cell::Bool(!t.warnings.is_empty()),
    ]);
    table
}

pub fn cmd_classify(args: &ClassifyArgs) -> Result<Report, Error> {
    let t = classify_regime(args.a, args.b)?;
    if args.points < 2 {
        return Err(Error::ParamOutOfRange {
            name: "points",
            value: args.points as f64,
            range: ">= 2".into(),
        });
    }
    let mut per_alpha = Table::new(vec!["alpha", "z_star", "has_tradeoff"]);
    for alpha in grid(0.0, t.alpha_cap, args.points) {
        let z_star = z_opt(args.a, args.b, alpha)?;
        // alpha = 0 is the null measurement: no gain and no disturbance.
        let has_tradeoff = alpha > 0.0 && z_star.abs() < 1.0;
        per_alpha.push(vec![
            Cell::Num(alpha),
            Cell::Num(z_star),
            Cell::Bool(has_tradeoff),
        ]);
    }
    Ok(Report {
        tables: vec![regime_summary(&t), per_alpha],
        diagnostics: t.warnings.clone(),
        exit_code: EXIT_OK,
    })
}

pub fn cmd_strength(args: &StrengthArgs) -> Result<Report, Error> {
    let closed = max_delta_in(args.k, args.a)?;
    let numeric = grid_search_max(args.k, args.a, args.grid)?;
    let mut t = Table::new(vec![
        "k",
        "a",
        "closed_max",
        "grid_max",
        "abs_diff",
        "z_star",
        "b_star",
        "alpha_star",
        "delta_out_at_max",
    ]);
    t.push(vec![
        Cell::Num(args.k),
        Cell::Num(args.a),
        Cell::Num(closed.value),
        Cell::Num(numeric.value),
        Cell::Num((closed.value - numeric.value).abs()),
        Cell::Num(closed.z_star),
        Cell::Num(closed.b_star),
        Cell::Num(closed.alpha_star),
        Cell::Num(closed.delta_out_at_max),
    ]);
    Ok(Report::single(t))
}

pub fn cmd_entropy(args: &EntropyArgs) -> Result<Report, Error> {
    let probs = match (&args.state.spectrum, args.state.a) {
        (Some(s), _) => s.clone(),
        (None, Some(a)) => {
            if !(0.0..=1.0).contains(&a) {
                return Err(Error::BlochOutOfBall(a));
            }
            vec![0.5 * (1.0 + a), 0.5 * (1.0 - a)]
        }
        (None, None) => unreachable!("clap enforces one state argument"),
    };
    let rho = DensityOperator::diagonal(&probs)?;
    let mut t = Table::new(vec!["measure", "dim", "value"]);
    t.push(vec![
        Cell::Text(args.measure.symbol().to_string()),
        Cell::Int(rho.dim() as u64),
        Cell::Num(args.measure.evaluate(&rho)),
    ]);
    Ok(Report::single(t))
}

pub fn execute(cli: &Cli) -> Result<Report, Error> {
    match &cli.command {
        Command::Curve(a) => cmd_curve(a),
        Command::Verify(a) => cmd_verify(a, cli.seed, cli.threads),
        Command::Classify(a) => cmd_classify(a),
        Command::Strength(a) => cmd_strength(a),
        Command::Entropy(a) => cmd_entropy(a),
    }
}

fn emit(cli: &Cli, report: &Report) -> io::Result<()> {
    match &cli.output {
        Some(path) => {
            let mut w = BufWriter::new(File::create(path)?);
            report.write(cli.format, &mut w)?;
            w.flush()
        }
        None => {
            let stdout = io::stdout();
            let mut w = BufWriter::new(stdout.lock());
            report.write(cli.format, &mut w)?;
            w.flush()
        }
    }
}

/// Parses arguments, runs the command and returns the process exit code.
pub fn main_with_args<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            use clap::error::ErrorKind;
            if matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion) {
                print!("{e}");
                return EXIT_OK;
            }
            let rendered = e.to_string();
            let line = rendered.lines().next().unwrap_or("invalid arguments");
            eprintln!("{line}");
            return EXIT_USAGE;
        }
    };
    match execute(&cli) {
        Ok(report) => {
            if let Err(e) = emit(&cli, &report) {
                eprintln!("error: cannot write output: {e}");
                return EXIT_USAGE;
            }
            for d in &report.diagnostics {
                eprintln!("{d}");
            }
            report.exit_code
        }
        Err(e) => {
            eprintln!("error: {e}");
            EXIT_USAGE
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn run(args: &[&str]) -> (Report, Format) {
        let cli = Cli::try_parse_from(std::iter::once("povm-tradeoff").chain(args.iter().copied()))
            .unwrap();
        (execute(&cli).unwrap(), cli.format)
    }

    fn render(args: &[&str]) -> String {
        let (report, format) = run(args);
        let mut buf = Vec::new();
        report.write(format, &mut buf).unwrap();
        String::from_utf8(buf).unwrap()
    }

    #[test]
    fn number_formatting() {
        assert_eq!(format_number(0.0), "0");
        assert_eq!(format_number(-0.0), "0");
        assert_eq!(format_number(1.0), "1");
        assert_eq!(format_number(0.2592), "0.2592");
        assert_eq!(format_number(-1.0), "-1");
        assert_eq!(format_number(1.0 / 3.0), "0.333333333333");
        assert_eq!(format_number(2.0 / 3.0), "0.666666666667");
        assert_eq!(format_number(1e-10), "1e-10");
        assert_eq!(format_number(1.5e-7), "1.5e-07");
        assert_eq!(format_number(123456.0), "123456");
        assert_eq!(format_number(1e12), "1e+12");
        assert_eq!(format_number(0.0001), "0.0001");
        assert_eq!(format_number(0.1 + 0.2), "0.3");
    }

    #[test]
    fn seed_parsing() {
        assert_eq!(parse_seed("0x5EED").unwrap(), DEFAULT_SEED);
        assert_eq!(parse_seed("7").unwrap(), 7);
        assert!(parse_seed("seven").is_err());
    }

    #[test]
    fn curve_output() {
        let out = render(&[
            "curve", "--a", "0.8", "--b", "0.9", "--alpha", "1", "--n", "3",
        ]);
        let lines: Vec<&str> = out.lines().collect();
        assert_eq!(lines[0], "z,delta_in,delta_out");
        assert_eq!(lines.len(), 4);
        assert!(lines[1].starts_with("-1,") && lines[1].ends_with(",0"));
        assert_eq!(lines[2], "0,0.1458,0.2592");
        assert!(lines[3].starts_with("1,") && lines[3].ends_with(",0"));

        let out = render(&[
            "curve", "--a", "0", "--b", "0.5", "--alpha", "1", "--n", "5",
        ]);
        assert!(out.lines().skip(1).all(|l| l.ends_with(",0")));
    }

    #[test]
    fn jsonl_output() {
        let out = render(&[
            "curve", "--a", "0.8", "--b", "0.9", "--alpha", "1", "--n", "3", "--format", "jsonl",
        ]);
        let second: Value = serde_json::from_str(out.lines().nth(1).unwrap()).unwrap();
        assert_eq!(second["delta_out"].as_f64().unwrap(), 0.2592);
        assert_eq!(second["z"].as_f64().unwrap(), 0.0);
    }

    #[test]
    fn entropy_examples() {
        let out = render(&["entropy", "--spectrum", "0.5,0.5", "--measure", "S"]);
        assert_eq!(out.lines().nth(1).unwrap(), "S,2,1");
        let out = render(&["entropy", "--spectrum", "1,0", "--measure", "Q"]);
        assert_eq!(out.lines().nth(1).unwrap(), "Q,2,0");
        let out = render(&["entropy", "--spectrum", "0.5,0.5", "--measure", "Q"]);
        assert!(out.lines().nth(1).unwrap().starts_with("Q,2,0.27865"));
        let out = render(&["entropy", "--a", "0", "--measure", "P"]);
        assert_eq!(out.lines().nth(1).unwrap(), "P,2,0.5");
    }

    #[test]
    fn strength_examples() {
        let (report, _) = run(&["strength", "--k", "1", "--a", "0.8", "--grid", "201"]);
        assert_eq!(
            report.tables[0].rows[0][2],
            Cell::Num(max_delta_in(1.0, 0.8).unwrap().value)
        );
        let out = render(&["strength", "--k", "0.5", "--a", "0.8", "--grid", "201"]);
        assert!(out.lines().nth(1).unwrap().contains("0.115714285714"));
    }

    #[test]
    fn classify_layout() {
        let out = render(&["classify", "--a", "0.5", "--b", "0.5", "--points", "5"]);
        let blocks: Vec<&str> = out.split("\n\n").collect();
        assert_eq!(blocks.len(), 2);
        assert!(blocks[0].starts_with("a,b,alpha_lo,alpha_hi"));
        assert!(blocks[1].starts_with("alpha,z_star,has_tradeoff"));
        assert_eq!(blocks[1].lines().count(), 6);
    }

    #[test]
    fn parameter_errors() {
        let cli = Cli::try_parse_from(["p", "classify", "--a", "0", "--b", "0.5"]).unwrap();
        assert!(execute(&cli).is_err());
        let cli = Cli::try_parse_from(["p", "curve", "--a", "1.5", "--b", "0.5", "--alpha", "1"])
            .unwrap();
        assert!(execute(&cli).is_err());
        assert!(Cli::try_parse_from(["p", "entropy", "--measure", "S"]).is_err());
        assert!(Cli::try_parse_from([
            "p",
            "entropy",
            "--spectrum",
            "1",
            "--a",
            "0.2",
            "--measure",
            "S"
        ])
        .is_err());
    }
}
