//! Command-line front end.
//!
//! Exit codes: 0 success, 1 a verification or scan check failed, 2 invalid
//! input, 3 evaluation mode not supported for the given copula.

use std::fs::File;
use std::io::{self, Write};
use std::path::PathBuf;

use clap::{Parser, Subcommand};

use crate::bounds::BoundParams;
use crate::concordance::{measure, EvalMode, MeasureKind};
use crate::copula::{Copula, UnitPoint};
use crate::regions::curves::write_inverse_csv;
use crate::regions::{extremal_scan, max_asymmetry_given, range_of, RangeCurve};
use crate::verify::{run_suite, Suite};
use crate::{Error, Result};

pub const EXIT_OK: i32 = 0;
pub const EXIT_CHECK_FAILED: i32 = 1;
pub const EXIT_INVALID: i32 = 2;
pub const EXIT_UNSUPPORTED: i32 = 3;

/// Environment variable capping the number of worker threads (0 = all cores).
pub const THREADS_ENV: &str = "COPULA_CONCORD_THREADS";

#[derive(Debug, Parser)]
#[command(
    name = "copula-concord",
    version,
    about = "Local bounds, asymmetry and measures of concordance of bivariate copulas"
)]
pub struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Evaluate a copula at a point.
    #[command(allow_negative_numbers = true)]
    Eval {
        /// w | m | pi | lower:a,b,c | upper:a,b,c, optionally followed by
        /// transform suffixes .t .s1 .s2 .hat
        spec: String,
        u: f64,
        v: f64,
    },
    /// Compute a measure of concordance.
    Measure {
        /// rho | tau | phi | gamma | beta
        kind: String,
        spec: String,
        /// closed | segments | checkerboard
        #[arg(long, default_value = "closed")]
        mode: String,
        /// Checkerboard order.
        #[arg(long, default_value_t = 256)]
        n: usize,
    },
    /// Range of a measure over copulas with asymmetry m, or the whole curve.
    #[command(allow_negative_numbers = true)]
    Region {
        kind: String,
        m: Option<f64>,
        /// Write the boundary curve as CSV (m, lower, upper).
        #[arg(long)]
        curve: bool,
        #[arg(long, default_value_t = 333)]
        resolution: usize,
        /// Output file for --curve; standard output if omitted.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Largest asymmetry compatible with a measure value.
    #[command(allow_negative_numbers = true)]
    Inverse {
        kind: String,
        kappa: Option<f64>,
        /// Write the inverse curve as CSV (kappa, mu_max).
        #[arg(long)]
        curve: bool,
        #[arg(long, default_value_t = 300)]
        resolution: usize,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Locate the extrema of the bound measures over the triangle.
    #[command(allow_negative_numbers = true)]
    Scan {
        kind: String,
        m: f64,
        #[arg(long, default_value_t = 64)]
        n: usize,
    },
    /// Run a verification suite.
    Verify {
        /// copula | q-props | prop41 | prop42 | prop43 | relations | regions | all
        #[arg(long, default_value = "all")]
        suite: String,
        #[arg(long, default_value_t = 256)]
        n: usize,
        #[arg(long, default_value_t = 42)]
        seed: u64,
    },
}

/// Formats with 15 significant digits, dropping trailing zeros.
pub fn format_value(x: f64) -> String {
    let rounded: f64 = format!("{x:.14e}").parse().unwrap_or(x);
    if rounded == 0.0 {
        "0".into()
    } else {
        rounded.to_string()
    }
}

fn format_error(e: f64) -> String {
    if e == 0.0 {
        "0".into()
    } else {
        format!("{e:.3e}")
    }
}

fn invalid(spec: &str, reason: impl Into<String>) -> Error {
    Error::InvalidSpec {
        spec: spec.into(),
        reason: reason.into(),
    }
}

/// Parses `w|m|pi|lower:a,b,c|upper:a,b,c` with an optional chain of
/// `.t`, `.s1`, `.s2`, `.hat` suffixes applied left to right.
pub fn parse_spec(spec: &str) -> Result<Copula> {
    let mut base = spec.trim();
    let mut suffixes = Vec::new();
    'strip: loop {
        for suffix in [".t", ".s1", ".s2", ".hat"] {
            if let Some(rest) = base.strip_suffix(suffix) {
                suffixes.push(suffix);
                base = rest;
                continue 'strip;
            }
        }
        break;
    }
    let lowered = base.to_ascii_lowercase();
    let mut copula = match lowered.as_str() {
        "w" => Copula::w(),
        "m" => Copula::m(),
        "pi" => Copula::pi(),
        other => {
            let (name, args) = other
                .split_once(':')
                .ok_or_else(|| invalid(spec, "expected w, m, pi, lower:a,b,c or upper:a,b,c"))?;
            let values = args
                .split(',')
                .map(|x| x.trim().parse::<f64>())
                .collect::<std::result::Result<Vec<f64>, _>>()
                .map_err(|_| invalid(spec, "parameters must be numbers"))?;
            let [a, b, c] = values[..] else {
                return Err(invalid(spec, "expected three parameters a,b,c"));
            };
            let params = BoundParams::new(a, b, c)?;
            match name {
                "lower" => Copula::lower(params),
                "upper" => Copula::upper(params),
                _ => return Err(invalid(spec, format!("unknown copula family {name:?}"))),
            }
        }
    };
    for suffix in suffixes.into_iter().rev() {
        copula = match suffix {
            ".t" => copula.transpose(),
            ".s1" => copula.sigma1(),
            ".s2" => copula.sigma2(),
            _ => copula.survival(),
        };
    }
    Ok(copula)
}

fn parse_mode(mode: &str, n: usize) -> Result<EvalMode> {
    match mode {
        "closed" => Ok(EvalMode::ClosedForm),
        "segments" => Ok(EvalMode::SegmentQuadrature),
        "checkerboard" if n >= 2 => Ok(EvalMode::Checkerboard(n)),
        "checkerboard" => Err(Error::GridTooSmall { n, min: 2 }),
        other => Err(Error::InvalidArgument {
            name: "mode",
            value: other.into(),
            reason: "expected closed, segments or checkerboard".into(),
        }),
    }
}

fn open_output(path: &Option<PathBuf>) -> Result<Box<dyn Write>> {
    Ok(match path {
        Some(p) => Box::new(File::create(p)?),
        None => Box::new(io::stdout()),
    })
}

fn missing(name: &'static str) -> Error {
    Error::InvalidArgument {
        name,
        value: String::new(),
        reason: "a value is required unless --curve is given".into(),
    }
}

/// Executes a parsed command, returning the exit code.
fn execute(command: Command, out: &mut dyn Write) -> Result<i32> {
    match command {
        Command::Eval { spec, u, v } => {
            let c = parse_spec(&spec)?;
            let p = UnitPoint::new(u, v)?;
            writeln!(out, "{}", format_value(c.eval_point(p)))?;
        }
        Command::Measure {
            kind,
            spec,
            mode,
            n,
        } => {
            let kind: MeasureKind = kind.parse()?;
            let c = parse_spec(&spec)?;
            let value = measure(kind, &c, parse_mode(&mode, n)?)?;
            writeln!(
                out,
                "{} mode={} error_bound={}",
                format_value(value.value),
                value.mode,
                format_error(value.error_bound)
            )?;
        }
        Command::Region {
            kind,
            m,
            curve,
            resolution,
            out: path,
        } => {
            let kind: MeasureKind = kind.parse()?;
            if curve {
                RangeCurve::of(kind).write_csv(resolution, open_output(&path)?)?;
            } else {
                let (g, h) = range_of(kind, m.ok_or_else(|| missing("m"))?)?;
                writeln!(out, "({}, {})", format_value(g), format_value(h))?;
            }
        }
        Command::Inverse {
            kind,
            kappa,
            curve,
            resolution,
            out: path,
        } => {
            let kind: MeasureKind = kind.parse()?;
            if curve {
                write_inverse_csv(kind, resolution, open_output(&path)?)?;
            } else {
                let mu = max_asymmetry_given(kind, kappa.ok_or_else(|| missing("kappa"))?)?;
                writeln!(out, "{}", format_value(mu))?;
            }
        }
        Command::Scan { kind, m, n } => {
            let kind: MeasureKind = kind.parse()?;
            let scan = extremal_scan(kind, m, n)?;
            let describe = |e: &crate::regions::extremal::Extremum| {
                if e.passed() {
                    e.declared.to_string()
                } else {
                    let p = e.attained_at[0];
                    format!("({}, {})", format_value(p.a), format_value(p.b))
                }
            };
            let verdict = if scan.passed() { "PASS" } else { "FAIL" };
            writeln!(
                out,
                "min: {}; max: {}; table: {verdict}",
                describe(&scan.min),
                describe(&scan.max)
            )?;
            for (label, e) in [("min", &scan.min), ("max", &scan.max)] {
                writeln!(
                    out,
                    "{label}: value {}, optimal grid points {}, of which {} off {}",
                    format_value(e.value),
                    e.attained_at.len(),
                    e.elsewhere,
                    e.declared
                )?;
            }
            if !scan.passed() {
                return Ok(EXIT_CHECK_FAILED);
            }
        }
        Command::Verify { suite, n, seed } => {
            let suite: Suite = suite.parse()?;
            if n < 2 {
                return Err(Error::GridTooSmall { n, min: 2 });
            }
            let report = run_suite(suite, n, seed)?;
            writeln!(out, "{report}")?;
            if !report.passed() {
                return Ok(EXIT_CHECK_FAILED);
            }
        }
    }
    Ok(EXIT_OK)
}

/// Exit code reported for a failed command.
pub fn exit_code(e: &Error) -> i32 {
    match e {
        Error::UnsupportedMode { .. } => EXIT_UNSUPPORTED,
        _ => EXIT_INVALID,
    }
}

/// Parses `args` (including the program name) and runs the command.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = e.exit_code();
            let target: &mut dyn Write = if e.use_stderr() { err } else { out };
            // nothing sensible is left to do if the terminal is gone
            let _ = write!(target, "{}", e.render());
            return code;
        }
    };
    match execute(cli.command, out) {
        Ok(code) => code,
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            exit_code(&e)
        }
    }
}

/// Applies [`THREADS_ENV`] to the global thread pool.
pub fn configure_threads() -> Result<()> {
    let Ok(value) = std::env::var(THREADS_ENV) else {
        return Ok(());
    };
    let bad = |reason: String| Error::InvalidArgument {
        name: THREADS_ENV,
        value: value.clone(),
        reason,
    };
    let threads: usize = value
        .trim()
        .parse()
        .map_err(|_| bad("expected a non-negative integer".into()))?;
    if threads > 0 {
        rayon::ThreadPoolBuilder::new()
            .num_threads(threads)
            .build_global()
            .map_err(|e| bad(e.to_string()))?;
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn run_str(args: &[&str]) -> (i32, String, String) {
        let mut out = Vec::new();
        let mut err = Vec::new();
        let mut full = vec!["copula-concord"];
        full.extend_from_slice(args);
        let code = run(full, &mut out, &mut err);
        (
            code,
            String::from_utf8(out).unwrap(),
            String::from_utf8(err).unwrap(),
        )
    }

    #[test]
    fn formatting() {
        assert_eq!(format_value(0.1), "0.1");
        assert_eq!(format_value(-0.904), "-0.904");
        assert_eq!(format_value(1.0 / 3.0), "0.333333333333333");
        assert_eq!(format_value(-0.0), "0");
        assert_eq!(format_value(0.1 + 0.2), "0.3");
    }

    #[test]
    fn spec_suffixes_apply_in_order() {
        let c = parse_spec("lower:0.4,0.6,0.1.t").unwrap();
        assert!((c.eval(0.6, 0.4) - 0.1).abs() < 1e-15);
        let c = parse_spec("M.s1").unwrap();
        assert_eq!(c.eval(0.3, 0.4), 0.0);
        let c = parse_spec("lower:0.4,0.6,0.1.s1.t").unwrap();
        assert_eq!(c.to_string(), "transpose(sigma1(lower(0.4, 0.6, 0.1)))");
        assert!(parse_spec("gumbel:2").is_err());
        assert!(parse_spec("lower:0.4,0.6").is_err());
    }

    #[test]
    fn eval_examples() {
        assert_eq!(
            run_str(&["eval", "lower:0.4,0.6,0.1", "0.4", "0.6"]).1,
            "0.1\n"
        );
        assert_eq!(run_str(&["eval", "pi", "0.5", "0.5"]).1, "0.25\n");
        let (code, _, err) = run_str(&["eval", "lower:0.4,0.6,0.5", "0.1", "0.1"]);
        assert_eq!(code, EXIT_INVALID);
        assert!(err.contains("min{a, b, 1-a, 1-b}"), "{err}");
    }

    #[test]
    fn unsupported_mode_maps_to_exit_3() {
        let grid = Copula::m().to_checkerboard(8).unwrap();
        let c = Copula::checkerboard(grid);
        let e = measure(MeasureKind::Rho, &c, EvalMode::ClosedForm).unwrap_err();
        assert_eq!(exit_code(&e), EXIT_UNSUPPORTED);
        assert_eq!(exit_code(&Error::WeightOutOfRange(2.0)), EXIT_INVALID);
    }

    #[test]
    fn negative_positionals() {
        let (code, out, _) = run_str(&["inverse", "gamma", "-0.75"]);
        assert_eq!(code, 0);
        assert_eq!(out, "0.25\n");
    }
}
