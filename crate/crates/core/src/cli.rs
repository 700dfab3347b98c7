//! `atanseries` command-line front end.
//!
//! Exit codes: 0 success, 1 domain error or failed verification, 2 usage error.

use std::ffi::OsString;
use std::fmt::Write as _;
use std::io::{self, Write};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use serde::Serialize;

use crate::analysis::{self, ConvergenceReport, PiScheme};
use crate::error::Error;
use crate::evaluators::{self, arctan_series, Form, SeriesConfig};
use crate::exact::{self, grids};

pub const EXIT_OK: u8 = 0;
pub const EXIT_FAILURE: u8 = 1;
pub const EXIT_USAGE: u8 = 2;

/// CSV header for convergence reports.
pub const CONVERGE_CSV_HEADER: &str = "M,partial_sum,abs_error,error_ratio,predicted_ratio";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, ValueEnum)]
pub enum OutputFormat {
    /// Aligned columns.
    #[default]
    Human,
    Csv,
    /// One JSON object per line.
    Jsonl,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum FormArg {
    Real,
    Complex,
}

impl From<FormArg> for Form {
    fn from(f: FormArg) -> Self {
        match f {
            FormArg::Real => Form::RealRational,
            FormArg::Complex => Form::ComplexPair,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Method {
    Complex,
    Rational,
    Trig,
    All,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum SchemeArg {
    Direct,
    Machin,
}

#[derive(Debug, Parser)]
#[command(name = "atanseries", version, about = "Series expansions of arctan: evaluate, differentiate, verify, study convergence")]
struct Cli {
    /// Output format.
    #[arg(long, value_enum, global = true, default_value_t = OutputFormat::Human)]
    format: OutputFormat,

    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Evaluate the truncated series at x.
    Eval {
        #[arg(long, allow_negative_numbers = true)]
        x: f64,
        /// Number of outer terms M.
        #[arg(long, default_value_t = 25, value_parser = clap::value_parser!(u32).range(1..))]
        terms: u32,
        #[arg(long, value_enum, default_value_t = FormArg::Real)]
        form: FormArg,
        /// Evaluate the terms at x = 0 instead of returning 0 directly.
        #[arg(long)]
        no_zero_shortcut: bool,
    },
    /// m-th derivative of arctan at x.
    Deriv {
        #[arg(long, allow_negative_numbers = true)]
        x: f64,
        #[arg(long, value_parser = clap::value_parser!(u32).range(1..))]
        m: u32,
        #[arg(long, value_enum, default_value_t = Method::All)]
        method: Method,
    },
    /// Check the identities exactly over the built-in rational grids.
    Verify {
        #[arg(long, default_value_t = 10, value_parser = clap::value_parser!(u32).range(1..))]
        max_m: u32,
    },
    /// Partial sums, errors and error ratios for M = 1..max-terms.
    Converge {
        /// One or more arguments (repeat the flag or separate with commas).
        #[arg(long, required = true, allow_negative_numbers = true, value_delimiter = ',')]
        x: Vec<f64>,
        #[arg(long, default_value_t = 20, value_parser = clap::value_parser!(u32).range(2..))]
        max_terms: u32,
        #[arg(long, value_enum, default_value_t = FormArg::Real)]
        form: FormArg,
    },
    /// Compute pi from the real rational series.
    Pi {
        #[arg(long, value_enum, default_value_t = SchemeArg::Machin)]
        scheme: SchemeArg,
        #[arg(long, default_value_t = 7, value_parser = clap::value_parser!(u32).range(1..))]
        terms: u32,
    },
}

/// Formats like C's `%.17g`: 17 significant digits, trailing zeros dropped,
/// scientific notation outside `1e-4 <= |v| < 1e17`.
pub fn fmt_g17(v: f64) -> String {
    if v == 0.0 {
        return if v.is_sign_negative() { "-0".into() } else { "0".into() };
    }
    if !v.is_finite() {
        return v.to_string();
    }
    let sci = format!("{v:.16e}");
    let (mantissa, exp) = sci.split_once('e').expect("exponent present");
    let exp: i32 = exp.parse().expect("integer exponent");
    if (-4..17).contains(&exp) {
        let fixed = format!("{:.*}", (16 - exp) as usize, v);
        strip_zeros(&fixed).to_string()
    } else {
        let sign = if exp < 0 { '-' } else { '+' };
        format!("{}e{sign}{:02}", strip_zeros(mantissa), exp.abs())
    }
}

fn strip_zeros(s: &str) -> &str {
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.')
    } else {
        s
    }
}

fn opt_g17(v: Option<f64>) -> String {
    v.map(fmt_g17).unwrap_or_default()
}

/// Lays out rows as left-aligned columns separated by two spaces.
fn columns(rows: &[Vec<String>]) -> String {
    let ncol = rows.iter().map(Vec::len).max().unwrap_or(0);
    let widths: Vec<usize> = (0..ncol)
        .map(|c| rows.iter().filter_map(|r| r.get(c)).map(String::len).max().unwrap_or(0))
        .collect();
    let mut out = String::new();
    for row in rows {
        let line: Vec<String> = row
            .iter()
            .enumerate()
            .map(|(c, cell)| format!("{cell:<w$}", w = widths[c]))
            .collect();
        out.push_str(line.join("  ").trim_end());
        out.push('\n');
    }
    out
}

fn json_line<T: Serialize>(value: &T) -> String {
    let mut s = serde_json::to_string(value).expect("plain data serializes");
    s.push('\n');
    s
}

struct Failure {
    code: u8,
    message: String,
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure {
            code: EXIT_FAILURE,
            message: e.to_string(),
        }
    }
}

/// Parses `args` (including the program name), runs the command, writes
/// results to `out` and diagnostics to `err`, and returns the exit code.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> u8
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = e.exit_code() as u8;
            let text = e.render().to_string();
            let sink: &mut dyn Write = if code == EXIT_OK { out } else { err };
            let _ = sink.write_all(text.as_bytes());
            return code;
        }
    };
    match execute(&cli) {
        Ok((text, code)) => {
            if out.write_all(text.as_bytes()).is_err() {
                return EXIT_FAILURE;
            }
            code
        }
        Err(f) => {
            let _ = writeln!(err, "error: {}", f.message);
            f.code
        }
    }
}

pub fn main() -> ExitCode {
    let stdout = io::stdout();
    let stderr = io::stderr();
    let code = run(std::env::args_os(), &mut stdout.lock(), &mut stderr.lock());
    ExitCode::from(code)
}

fn execute(cli: &Cli) -> Result<(String, u8), Failure> {
    let format = cli.format;
    match cli.command {
        Command::Eval {
            x,
            terms,
            form,
            no_zero_shortcut,
        } => cmd_eval(x, terms, form.into(), !no_zero_shortcut, format).map(|s| (s, EXIT_OK)),
        Command::Deriv { x, m, method } => cmd_deriv(x, m, method, format).map(|s| (s, EXIT_OK)),
        Command::Verify { max_m } => cmd_verify(max_m, format),
        Command::Converge {
            ref x,
            max_terms,
            form,
        } => cmd_converge(x, max_terms, form.into(), format).map(|s| (s, EXIT_OK)),
        Command::Pi { scheme, terms } => {
            let scheme = match scheme {
                SchemeArg::Direct => PiScheme::DirectX1,
                SchemeArg::Machin => PiScheme::Machin,
            };
            cmd_pi(scheme, terms, format).map(|s| (s, EXIT_OK))
        }
    }
}

fn form_name(form: Form) -> &'static str {
    match form {
        Form::RealRational => "real",
        Form::ComplexPair => "complex",
    }
}

fn cmd_eval(x: f64, terms: u32, form: Form, shortcut: bool, format: OutputFormat) -> Result<String, Failure> {
    let mut cfg = SeriesConfig::new(x, terms, form)?;
    cfg.zero_shortcut = shortcut;
    let value = arctan_series(&cfg)?;
    Ok(match format {
        OutputFormat::Human => format!("{}\n", fmt_g17(value)),
        OutputFormat::Csv => format!(
            "x,M,form,value\n{},{terms},{},{}\n",
            fmt_g17(x),
            form_name(form),
            fmt_g17(value)
        ),
        OutputFormat::Jsonl => {
            #[derive(Serialize)]
            struct Row<'a> {
                x: f64,
                #[serde(rename = "M")]
                m: u32,
                form: &'a str,
                value: f64,
            }
            json_line(&Row {
                x,
                m: terms,
                form: form_name(form),
                value,
            })
        }
    })
}

/// Largest pairwise `|a - b| / max(|a|, |b|)`; pairs of exact zeros count as 0.
pub fn max_pairwise_deviation(values: &[f64]) -> f64 {
    let mut worst: f64 = 0.0;
    for (i, a) in values.iter().enumerate() {
        for b in &values[i + 1..] {
            let scale = a.abs().max(b.abs());
            if scale > 0.0 {
                worst = worst.max((a - b).abs() / scale);
            }
        }
    }
    worst
}

fn cmd_deriv(x: f64, m: u32, method: Method, format: OutputFormat) -> Result<String, Failure> {
    let mut complex = None;
    let mut rational = None;
    let mut trig = None;
    if matches!(method, Method::Complex | Method::All) {
        complex = Some(evaluators::arctan_deriv_complex(x, m)?);
    }
    if matches!(method, Method::Rational | Method::All) {
        rational = Some(evaluators::arctan_deriv_rational(x, m)?);
    }
    if matches!(method, Method::Trig | Method::All) {
        trig = Some(evaluators::arctan_deriv_trig(x, m)?);
    }
    let deviation = (method == Method::All).then(|| {
        max_pairwise_deviation(&[complex.unwrap(), rational.unwrap(), trig.unwrap()])
    });

    Ok(match format {
        OutputFormat::Human => {
            let mut rows = Vec::new();
            for (name, v) in [("complex", complex), ("rational", rational), ("trig", trig)] {
                if let Some(v) = v {
                    rows.push(vec![name.to_string(), fmt_g17(v)]);
                }
            }
            if let Some(d) = deviation {
                rows.push(vec!["max_rel_deviation".into(), fmt_g17(d)]);
            }
            columns(&rows)
        }
        OutputFormat::Csv => format!(
            "x,m,complex,rational,trig,max_rel_deviation\n{},{m},{},{},{},{}\n",
            fmt_g17(x),
            opt_g17(complex),
            opt_g17(rational),
            opt_g17(trig),
            opt_g17(deviation)
        ),
        OutputFormat::Jsonl => {
            #[derive(Serialize)]
            struct Row {
                x: f64,
                m: u32,
                complex: Option<f64>,
                rational: Option<f64>,
                trig: Option<f64>,
                max_rel_deviation: Option<f64>,
            }
            json_line(&Row {
                x,
                m,
                complex,
                rational,
                trig,
                max_rel_deviation: deviation,
            })
        }
    })
}

/// Outcome of one identity family over its grid.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct IdentityOutcome {
    pub identity: &'static str,
    pub instances: usize,
    pub passed: usize,
}

impl IdentityOutcome {
    pub fn ok(&self) -> bool {
        self.instances == self.passed
    }
}

/// Runs the three exact identity families for `m = 1..=max_m`.
pub fn verify_all(max_m: u32) -> Result<Vec<IdentityOutcome>, Error> {
    type Check = fn(&exact::BigRational, u32) -> crate::Result<bool>;
    let families: [(&'static str, Vec<exact::BigRational>, Check); 3] = [
        ("term-identity", grids::term_identity(), exact::verify_term_identity),
        ("derivative-identity", grids::derivative_identity(), exact::verify_derivative_identity),
        ("decomposition", grids::decomposition(), exact::verify_decomposition),
    ];
    let mut outcomes = Vec::new();
    for (identity, grid, check) in families {
        let mut instances = 0;
        let mut passed = 0;
        for x in &grid {
            for m in 1..=max_m {
                instances += 1;
                if check(x, m)? {
                    passed += 1;
                }
            }
        }
        outcomes.push(IdentityOutcome {
            identity,
            instances,
            passed,
        });
    }
    Ok(outcomes)
}

fn cmd_verify(max_m: u32, format: OutputFormat) -> Result<(String, u8), Failure> {
    let outcomes = verify_all(max_m)?;
    let status = |o: &IdentityOutcome| if o.ok() { "PASS" } else { "FAIL" };
    let text = match format {
        OutputFormat::Human => {
            let mut rows = vec![vec![
                "identity".to_string(),
                "instances".into(),
                "passed".into(),
                "status".into(),
            ]];
            for o in &outcomes {
                rows.push(vec![
                    o.identity.to_string(),
                    o.instances.to_string(),
                    o.passed.to_string(),
                    status(o).into(),
                ]);
            }
            columns(&rows)
        }
        OutputFormat::Csv => {
            let mut s = String::from("identity,instances,passed,status\n");
            for o in &outcomes {
                let _ = writeln!(s, "{},{},{},{}", o.identity, o.instances, o.passed, status(o));
            }
            s
        }
        OutputFormat::Jsonl => {
            #[derive(Serialize)]
            struct Row<'a> {
                #[serde(flatten)]
                outcome: &'a IdentityOutcome,
                max_m: u32,
                status: &'a str,
            }
            outcomes
                .iter()
                .map(|o| {
                    json_line(&Row {
                        outcome: o,
                        max_m,
                        status: status(o),
                    })
                })
                .collect()
        }
    };
    let code = if outcomes.iter().all(IdentityOutcome::ok) {
        EXIT_OK
    } else {
        EXIT_FAILURE
    };
    Ok((text, code))
}

/// The CSV block for one report: header plus one row per entry.
pub fn report_csv(report: &ConvergenceReport) -> String {
    let mut s = String::from(CONVERGE_CSV_HEADER);
    s.push('\n');
    for e in &report.entries {
        let _ = writeln!(
            s,
            "{},{},{},{},{}",
            e.m,
            fmt_g17(e.partial_sum),
            fmt_g17(e.abs_error),
            opt_g17(e.error_ratio),
            fmt_g17(report.predicted_ratio)
        );
    }
    s
}

pub fn report_jsonl(report: &ConvergenceReport) -> String {
    #[derive(Serialize)]
    struct Row {
        #[serde(rename = "M")]
        m: u32,
        partial_sum: f64,
        abs_error: f64,
        error_ratio: Option<f64>,
        predicted_ratio: f64,
    }
    report
        .entries
        .iter()
        .map(|e| {
            json_line(&Row {
                m: e.m,
                partial_sum: e.partial_sum,
                abs_error: e.abs_error,
                error_ratio: e.error_ratio,
                predicted_ratio: report.predicted_ratio,
            })
        })
        .collect()
}

fn report_human(report: &ConvergenceReport) -> String {
    let mut rows = vec![CONVERGE_CSV_HEADER.split(',').map(String::from).collect::<Vec<_>>()];
    for e in &report.entries {
        rows.push(vec![
            e.m.to_string(),
            fmt_g17(e.partial_sum),
            fmt_g17(e.abs_error),
            opt_g17(e.error_ratio),
            fmt_g17(report.predicted_ratio),
        ]);
    }
    columns(&rows)
}

fn cmd_converge(xs: &[f64], max_terms: u32, form: Form, format: OutputFormat) -> Result<String, Failure> {
    let reports = analysis::convergence_studies(xs, max_terms, form)?;
    let blocks: Vec<String> = reports
        .iter()
        .map(|r| match format {
            OutputFormat::Human => {
                let mut s = format!("# x = {}, form = {}\n", fmt_g17(r.x), form_name(r.form));
                s.push_str(&report_human(r));
                s
            }
            OutputFormat::Csv => report_csv(r),
            OutputFormat::Jsonl => report_jsonl(r),
        })
        .collect();
    let sep = match format {
        OutputFormat::Jsonl => "",
        _ => "\n",
    };
    Ok(blocks.join(sep))
}

fn cmd_pi(scheme: PiScheme, terms: u32, format: OutputFormat) -> Result<String, Failure> {
    let p = analysis::compute_pi(scheme, terms)?;
    let name = match scheme {
        PiScheme::DirectX1 => "direct",
        PiScheme::Machin => "machin",
    };
    Ok(match format {
        OutputFormat::Human => columns(&[
            vec!["value".into(), fmt_g17(p.value)],
            vec!["abs_error".into(), fmt_g17(p.abs_error)],
        ]),
        OutputFormat::Csv => format!(
            "scheme,M,value,abs_error\n{name},{terms},{},{}\n",
            fmt_g17(p.value),
            fmt_g17(p.abs_error)
        ),
        OutputFormat::Jsonl => json_line(&p),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn run_args(args: &[&str]) -> (u8, String, String) {
        let mut out = Vec::new();
        let mut err = Vec::new();
        let mut full = vec!["atanseries"];
        full.extend_from_slice(args);
        let code = run(full, &mut out, &mut err);
        (code, String::from_utf8(out).unwrap(), String::from_utf8(err).unwrap())
    }

    #[test]
    fn g17_formatting() {
        assert_eq!(fmt_g17(0.0), "0");
        assert_eq!(fmt_g17(3.2), "3.2000000000000002");
        assert_eq!(fmt_g17(0.8), "0.80000000000000004");
        assert_eq!(fmt_g17(0.5), "0.5");
        assert_eq!(fmt_g17(1.0), "1");
        assert_eq!(fmt_g17(-2.0), "-2");
        assert_eq!(fmt_g17(std::f64::consts::FRAC_PI_4), "0.78539816339744828");
        assert_eq!(fmt_g17(1e-5), "1.0000000000000001e-05");
        assert_eq!(fmt_g17(1.25e-20), "1.25e-20");
        assert_eq!(fmt_g17(1e17), "1e+17");
        assert_eq!(fmt_g17(123456.0), "123456");
    }

    #[test]
    fn g17_round_trips() {
        for v in [0.1, 1.0 / 3.0, 5.84e-2, 2.5e-300, -7.0e15, 9.999999999999999e-6, f64::MAX] {
            assert_eq!(fmt_g17(v).parse::<f64>().unwrap().to_bits(), v.to_bits(), "{v}");
        }
    }

    #[test]
    fn deviation_ignores_matching_zeros() {
        assert_eq!(max_pairwise_deviation(&[0.0, 0.0, 0.0]), 0.0);
        assert_eq!(max_pairwise_deviation(&[1.0, 1.0, 1.0]), 0.0);
        assert_eq!(max_pairwise_deviation(&[2.0, 1.0]), 0.5);
    }

    #[test]
    fn eval_prints_value() {
        let (code, out, _) = run_args(&["eval", "--x", "0", "--terms", "5", "--form", "real"]);
        assert_eq!(code, 0);
        assert_eq!(out, "0\n");
        let (code, out, _) = run_args(&["eval", "--x", "-1", "--terms", "1"]);
        assert_eq!(code, 0);
        assert_eq!(out, "-0.80000000000000004\n");
    }

    #[test]
    fn usage_errors_exit_two() {
        assert_eq!(run_args(&["eval", "--x", "abc"]).0, EXIT_USAGE);
        assert_eq!(run_args(&["eval", "--x", "1", "--terms", "0"]).0, EXIT_USAGE);
        assert_eq!(run_args(&["converge", "--x", "1", "--max-terms", "1"]).0, EXIT_USAGE);
        assert_eq!(run_args(&["frobnicate"]).0, EXIT_USAGE);
        assert_eq!(run_args(&[]).0, EXIT_USAGE);
        let (code, out, _) = run_args(&["--help"]);
        assert_eq!(code, EXIT_OK);
        assert!(out.contains("converge"));
    }

    #[test]
    fn verify_reports_all_families() {
        let outcomes = verify_all(3).unwrap();
        assert_eq!(outcomes.len(), 3);
        assert_eq!(outcomes[0].instances, 15);
        assert_eq!(outcomes[1].instances, 12);
        assert_eq!(outcomes[2].instances, 24);
        assert!(outcomes.iter().all(IdentityOutcome::ok));
    }

    #[test]
    fn multiple_arguments_keep_order() {
        let (code, out, _) = run_args(&["converge", "--x", "2,0.5", "--max-terms", "3", "--format", "csv"]);
        assert_eq!(code, 0);
        let blocks: Vec<&str> = out.split("\n\n").collect();
        assert_eq!(blocks.len(), 2);
        assert!(blocks[0].contains(",0.5\n"));
        assert!(blocks[1].contains(&fmt_g17(analysis::predicted_ratio(0.5))));
    }
}
