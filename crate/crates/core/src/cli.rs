//! The `mmslab` command line.
//!
//! Exit codes: 0 on success, 1 when a verification or invariant check fails,
//! 2 for usage and input-format errors. `MMSLAB_THREADS` caps the worker pool.

use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use serde::Serialize;
use serde_json::json;

use crate::averaging::build_operator;
use crate::constructions::{gen_sharpness, sample_instance, Generator};
use crate::error::{Error, Result};
use crate::experiments::{
    convergence_experiment, dyadic_radii, scan, verify_suite, write_scan_csv, Check, FunctionSpec,
    ScanOptions, SuiteConfig,
};
use crate::io::{fmt_num, measure_json, read_function, read_measure, read_space, space_json};
use crate::metric::BallKind;
use crate::nets::{doubling_upper_bound_with_net, net_constant_m, DEFAULT_EXHAUSTIVE_CAP};

#[derive(Debug, Parser)]
#[command(
    name = "mmslab",
    version,
    about = "Averaging operators on finite metric measure spaces"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum Ball {
    Open,
    Closed,
}

impl From<Ball> for BallKind {
    fn from(b: Ball) -> Self {
        match b {
            Ball::Open => BallKind::Open,
            Ball::Closed => BallKind::Closed,
        }
    }
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum BallChoice {
    Open,
    Closed,
    Both,
}

impl BallChoice {
    fn kinds(self) -> Vec<BallKind> {
        match self {
            BallChoice::Open => vec![BallKind::Open],
            BallChoice::Closed => vec![BallKind::Closed],
            BallChoice::Both => BallKind::BOTH.to_vec(),
        }
    }
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum Format {
    Csv,
    Json,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum SampleKind {
    Gaussian,
    Exponential,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Generate instances.
    Gen {
        #[command(subcommand)]
        what: GenCommand,
    },
    /// Net constant M and doubling-constant bounds.
    Nets {
        #[arg(long)]
        space: PathBuf,
        #[arg(long, value_enum, default_value = "closed")]
        ball: Ball,
        #[arg(long)]
        report: Option<PathBuf>,
        #[arg(long, default_value_t = DEFAULT_EXHAUSTIVE_CAP)]
        cap: usize,
    },
    /// Operator norm of one averaging operator, certified against M.
    Norm {
        #[arg(long)]
        space: PathBuf,
        #[arg(long)]
        measure: PathBuf,
        #[arg(long)]
        radius: f64,
        #[arg(long, value_enum, default_value = "closed")]
        ball: Ball,
        /// `1` or `inf`.
        #[arg(long, default_value = "1")]
        p: String,
        #[arg(long, default_value_t = DEFAULT_EXHAUSTIVE_CAP)]
        cap: usize,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Sweep radii and report norms, M and C.
    Scan {
        #[arg(long)]
        space: PathBuf,
        #[arg(long)]
        measure: PathBuf,
        /// Comma-separated radii.
        #[arg(long)]
        radii: String,
        #[arg(long, value_enum, default_value = "closed")]
        ball: BallChoice,
        /// Comma-separated exponents for the interpolation check.
        #[arg(long)]
        p: Option<String>,
        #[arg(long, default_value_t = 1000)]
        trials: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, value_enum, default_value = "csv")]
        format: Format,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// `||A_r f - f||_p` along decreasing radii.
    Converge {
        #[arg(long)]
        space: PathBuf,
        #[arg(long)]
        measure: PathBuf,
        /// `bump`, `threshold:AXIS:T`, or `table:PATH` (a function JSON file).
        #[arg(long, default_value = "bump")]
        f: String,
        #[arg(long, default_value_t = 1.0)]
        p: f64,
        /// Comma-separated, strictly decreasing radii.
        #[arg(long, conflicts_with = "dyadic")]
        radii: Option<String>,
        /// Use radii 2^0, ..., 2^-K.
        #[arg(long)]
        dyadic: Option<u32>,
        #[arg(long, value_enum, default_value = "closed")]
        ball: Ball,
        #[arg(long, value_enum, default_value = "csv")]
        format: Format,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Run the built-in verification suite.
    Verify {
        /// Comma-separated checks (default: all).
        #[arg(long)]
        select: Option<String>,
        #[arg(long)]
        seed: Option<u64>,
        /// Use small instance counts.
        #[arg(long)]
        quick: bool,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Debug, Subcommand)]
enum GenCommand {
    /// Cluster family on (R^d, sup norm).
    Sharpness {
        #[arg(long)]
        dim: usize,
        #[arg(long)]
        clusters: usize,
        /// `space.json,measure.json`; prints both to stdout when absent.
        #[arg(short = 'o', long)]
        output: Option<String>,
    },
    /// Empirical sample with uniform weights.
    Sample {
        #[arg(long, value_enum)]
        kind: SampleKind,
        #[arg(long, default_value_t = 1)]
        dim: usize,
        #[arg(long)]
        size: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(short = 'o', long)]
        output: Option<String>,
    },
}

/// Parses `args` (including the program name) and runs the command.
pub fn run<I, T>(args: I) -> ExitCode
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 2 } else { 0 });
        }
    };
    if let Some(threads) = std::env::var("MMSLAB_THREADS")
        .ok()
        .and_then(|v| v.parse::<usize>().ok())
    {
        let _ = rayon::ThreadPoolBuilder::new()
            .num_threads(threads)
            .build_global();
    }
    match execute(cli.command) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(match e {
                Error::InvariantViolation(_) => 1,
                _ => 2,
            })
        }
    }
}

fn parse_list(text: &str) -> Result<Vec<f64>> {
    text.split(',')
        .map(|t| {
            t.trim()
                .parse::<f64>()
                .map_err(|_| Error::InvalidInput(format!("not a number: {t:?}")))
        })
        .collect()
}

fn emit(out: Option<&Path>, body: &str) -> Result<()> {
    match out {
        Some(p) => std::fs::write(p, body)?,
        None => {
            let mut stdout = std::io::stdout().lock();
            stdout.write_all(body.as_bytes())?;
            if !body.ends_with('\n') {
                stdout.write_all(b"\n")?;
            }
        }
    }
    Ok(())
}

fn to_json<T: Serialize>(value: &T) -> Result<String> {
    Ok(serde_json::to_string_pretty(value)?)
}

fn write_pair(output: Option<&str>, space: String, measure: String) -> Result<()> {
    match output {
        Some(spec) => {
            let (s, m) = spec
                .split_once(',')
                .ok_or_else(|| Error::InvalidInput("-o expects space.json,measure.json".into()))?;
            std::fs::write(s, space)?;
            std::fs::write(m, measure)?;
            Ok(())
        }
        None => emit(
            None,
            &format!("{{\"space\":{space},\"measure\":{measure}}}"),
        ),
    }
}

fn parse_function_spec(text: &str) -> Result<FunctionSpec> {
    let parts: Vec<&str> = text.splitn(3, ':').collect();
    match parts[..] {
        ["bump"] => Ok(FunctionSpec::GaussianBump),
        ["threshold", axis, t] => Ok(FunctionSpec::Threshold {
            axis: axis
                .parse()
                .map_err(|_| Error::InvalidInput(format!("bad axis {axis:?}")))?,
            threshold: t
                .parse()
                .map_err(|_| Error::InvalidInput(format!("bad threshold {t:?}")))?,
        }),
        ["table", path] => Ok(FunctionSpec::Table(
            read_function(Path::new(path))?.into_values(),
        )),
        _ => Err(Error::InvalidInput(format!(
            "unknown function spec {text:?}"
        ))),
    }
}

fn execute(command: Command) -> Result<bool> {
    match command {
        Command::Gen { what } => match what {
            GenCommand::Sharpness {
                dim,
                clusters,
                output,
            } => {
                let inst = gen_sharpness(dim, clusters)?;
                write_pair(
                    output.as_deref(),
                    space_json(&inst.space)?,
                    measure_json(&inst.measure)?,
                )?;
                Ok(true)
            }
            GenCommand::Sample {
                kind,
                dim,
                size,
                seed,
                output,
            } => {
                let generator = match kind {
                    SampleKind::Gaussian => Generator::Gaussian { dim },
                    SampleKind::Exponential => Generator::Exponential1d,
                };
                let inst = sample_instance(generator, size, seed)?;
                write_pair(
                    output.as_deref(),
                    space_json(&inst.space)?,
                    measure_json(&inst.measure)?,
                )?;
                Ok(true)
            }
        },
        Command::Nets {
            space,
            ball,
            report,
            cap,
        } => {
            let space = read_space(&space)?;
            let kind = ball.into();
            let net = net_constant_m(&space, kind, None, cap);
            let doubling = doubling_upper_bound_with_net(&space, kind, &net);
            emit(
                report.as_deref(),
                &to_json(&json!({ "net": net, "doubling": doubling }))?,
            )?;
            Ok(true)
        }
        Command::Norm {
            space,
            measure,
            radius,
            ball,
            p,
            cap,
            out,
        } => {
            let space = read_space(&space)?;
            let measure = read_measure(&measure)?;
            let kind = ball.into();
            let op = build_operator(&space, &measure, radius, kind)?;
            let net = net_constant_m(&space, kind, None, cap);
            let (norm, argmax) = match p.as_str() {
                "1" => {
                    let (y, a) = op.conjugate().sup();
                    (a, y)
                }
                "inf" => (1.0, op.rows()[0].point),
                other => {
                    return Err(Error::InvalidInput(format!(
                        "--p must be 1 or inf, got {other:?}"
                    )))
                }
            };
            let certified = net.exact && norm <= net.cardinality as f64 + 1e-12;
            emit(
                out.as_deref(),
                &to_json(&json!({
                    "norm": norm,
                    "argmax_point": argmax,
                    "M": net.cardinality,
                    "exactM": net.exact,
                    "certified": certified,
                }))?,
            )?;
            Ok(!net.exact || certified)
        }
        Command::Scan {
            space,
            measure,
            radii,
            ball,
            p,
            trials,
            seed,
            format,
            out,
        } => {
            let space = read_space(&space)?;
            let measure = read_measure(&measure)?;
            let radii = parse_list(&radii)?;
            let ps = p
                .as_deref()
                .map(parse_list)
                .transpose()?
                .unwrap_or_default();
            let options = ScanOptions {
                lp_trials: trials,
                seed,
                ..ScanOptions::default()
            };
            let rows = scan(&space, &measure, &radii, &ball.kinds(), &ps, &options)?;
            let body = match format {
                Format::Json => to_json(&rows)?,
                Format::Csv => {
                    let mut buf = Vec::new();
                    write_scan_csv(&mut buf, &rows)?;
                    String::from_utf8(buf).expect("csv output is utf-8")
                }
            };
            emit(out.as_deref(), &body)?;
            Ok(true)
        }
        Command::Converge {
            space,
            measure,
            f,
            p,
            radii,
            dyadic,
            ball,
            format,
            out,
        } => {
            let space = read_space(&space)?;
            let measure = read_measure(&measure)?;
            let f = parse_function_spec(&f)?.evaluate(&space)?;
            let radii = match (radii, dyadic) {
                (Some(r), _) => parse_list(&r)?,
                (None, Some(k)) => dyadic_radii(k),
                (None, None) => dyadic_radii(20),
            };
            let rep = convergence_experiment(&space, &measure, &f, p, &radii, ball.into(), None)?;
            let body = match format {
                Format::Json => to_json(&rep)?,
                Format::Csv => {
                    let mut w = csv::Writer::from_writer(Vec::new());
                    w.write_record(["radius", "p", "error", "l1_norm"])?;
                    for r in &rep.rows {
                        w.write_record([
                            fmt_num(r.radius),
                            fmt_num(r.p),
                            fmt_num(r.error),
                            fmt_num(r.l1_norm),
                        ])?;
                    }
                    String::from_utf8(w.into_inner().map_err(|e| Error::Io(e.into_error()))?)
                        .expect("csv output is utf-8")
                }
            };
            emit(out.as_deref(), &body)?;
            Ok(true)
        }
        Command::Verify {
            select,
            seed,
            quick,
            out,
        } => {
            let selection: Vec<Check> = match select {
                Some(s) => s
                    .split(',')
                    .filter(|t| !t.trim().is_empty())
                    .map(|t| t.trim().parse())
                    .collect::<Result<_>>()?,
                None => Check::ALL.to_vec(),
            };
            let mut config = if quick {
                SuiteConfig::quick()
            } else {
                SuiteConfig::default()
            };
            if let Some(seed) = seed {
                config.seed = seed;
            }
            let report = verify_suite(&selection, &config)?;
            for c in &report.checks {
                eprintln!(
                    "[{}] {} ({} instances, {} ms): {}",
                    if c.passed { "PASS" } else { "FAIL" },
                    c.check.name(),
                    c.instances,
                    c.elapsed_ms,
                    c.witness.as_deref().unwrap_or(&c.detail)
                );
            }
            emit(out.as_deref(), &to_json(&report)?)?;
            Ok(report.passed)
        }
    }
}
