use std::ffi::OsString;
use std::io::Write;
use std::path::PathBuf;

use clap::{Parser, Subcommand};
use fockforge::fock::PolarParam;
use fockforge::protocols;
use serde::Serialize;

use crate::config::{ConfigEcho, ConfigError, MarginSetting, OutputFormat, RunConfig};
use crate::output;
use crate::suite;
use crate::sweep::{Axis, CheckName, Grid, SweepRow, SweepSpec};

pub const EXIT_PASS: i32 = 0;
pub const EXIT_FAIL: i32 = 1;
pub const EXIT_CONFIG: i32 = 2;

/// Verify coherent-state swap and cloning constructions in a truncated
/// Fock space.
///
/// Complex parameters are written "re,im", "mod@phase" or as a bare real.
#[derive(Debug, Parser)]
#[command(name = "fockforge", version)]
pub struct Cli {
    /// Fock cutoff per mode.
    #[arg(
        long = "nmax",
        env = "FOCKFORGE_NMAX",
        default_value_t = 36,
        global = true
    )]
    pub n_max: usize,
    /// Comparison margin: an integer or "auto" (ceil(nmax / 4)).
    #[arg(long, default_value = "auto", global = true)]
    pub margin: MarginSetting,
    /// Pass tolerance for residuals and fidelity deficits.
    #[arg(
        long,
        default_value_t = 1e-6,
        allow_hyphen_values = true,
        global = true
    )]
    pub tol: f64,
    /// Seed for randomized parameter draws.
    #[arg(long, default_value_t = 7, global = true)]
    pub seed: u64,
    #[arg(long, value_enum, default_value_t = OutputFormat::Json, global = true)]
    pub format: OutputFormat,
    /// Write the report body here instead of stdout.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Run every identity check, protocol, closure test and permutation test.
    VerifyAll {
        /// Seeded parameter draws per check.
        #[arg(long, default_value_t = 3)]
        draws: usize,
    },
    /// Swap |a1> (x) |a2> into |a2> (x) |a1>.
    Swap {
        #[arg(long, allow_hyphen_values = true)]
        a1: PolarParam,
        #[arg(long, allow_hyphen_values = true)]
        a2: PolarParam,
        /// Beamsplitter phase.
        #[arg(long, default_value_t = 0.0, allow_hyphen_values = true)]
        delta: f64,
    },
    /// Split |alpha> (x) |0> into |alpha/sqrt2> (x) |alpha/sqrt2>.
    Clone {
        #[arg(long, allow_hyphen_values = true)]
        alpha: PolarParam,
    },
    /// Run one check over a parameter grid and emit one row per point.
    Sweep {
        #[arg(value_enum)]
        check: CheckName,
        /// Comma list or start:stop:count.
        #[arg(long, default_value = "", allow_hyphen_values = true)]
        grid: Grid,
        #[arg(long, value_enum, default_value_t = Axis::Modulus)]
        axis: Axis,
        /// Primary parameter; the axis replaces one of its coordinates.
        #[arg(long, default_value = "0.5", allow_hyphen_values = true)]
        param: PolarParam,
        /// Second parameter for two-argument checks.
        #[arg(long, default_value = "0.5", allow_hyphen_values = true)]
        aux: PolarParam,
    },
}

impl Cli {
    pub fn config(&self) -> RunConfig {
        RunConfig {
            n_max: self.n_max,
            margin: self.margin,
            tolerance: self.tol,
            seed: self.seed,
            output_format: self.format,
            output_path: self.out.clone(),
        }
    }
}

#[derive(Serialize)]
struct ProtocolBody<'a> {
    config: ConfigEcho,
    passed: bool,
    result: &'a protocols::TwoModeProtocolResult,
    warnings: &'a [String],
    #[serde(skip_serializing_if = "Vec::is_empty")]
    marginals: Vec<Marginal>,
}

#[derive(Serialize)]
struct Marginal {
    mode: usize,
    mean_occupation: f64,
    expected: f64,
}

#[derive(Serialize)]
struct SweepBody<'a> {
    config: ConfigEcho,
    check: CheckName,
    axis: Axis,
    passed: bool,
    rows: &'a [SweepRow],
}

/// Parses `args` (program name first) and runs the command; returns the
/// exit code.
pub fn run_from<I, T>(args: I, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    match Cli::try_parse_from(args) {
        Ok(cli) => run(&cli, stdout, stderr),
        Err(e) => {
            let code = e.exit_code();
            let text = e.render().to_string();
            let sink: &mut dyn Write = if code == 0 { stdout } else { stderr };
            let _ = sink.write_all(text.as_bytes());
            if code == 0 {
                EXIT_PASS
            } else {
                EXIT_CONFIG
            }
        }
    }
}

pub fn run(cli: &Cli, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32 {
    match execute(cli, stdout, stderr) {
        Ok(true) => EXIT_PASS,
        Ok(false) => EXIT_FAIL,
        Err(Failure::Config(e)) => {
            let _ = writeln!(stderr, "error: {e}");
            EXIT_CONFIG
        }
        Err(Failure::Run(e)) => {
            let _ = writeln!(stderr, "error: {e}");
            EXIT_FAIL
        }
    }
}

enum Failure {
    Config(ConfigError),
    Run(fockforge::Error),
}

impl From<ConfigError> for Failure {
    fn from(e: ConfigError) -> Self {
        Self::Config(e)
    }
}

impl From<fockforge::Error> for Failure {
    fn from(e: fockforge::Error) -> Self {
        Self::Run(e)
    }
}

fn warn(stderr: &mut dyn Write, name: &str, warnings: &[String]) {
    for w in warnings {
        let _ = writeln!(stderr, "warning: {name}: {w}");
    }
}

fn execute(cli: &Cli, stdout: &mut dyn Write, stderr: &mut dyn Write) -> Result<bool, Failure> {
    let config = cli.config();
    config.validate()?;
    let path = config.output_path.as_deref();
    match &cli.command {
        Command::VerifyAll { draws } => {
            let outcome = suite::verify_all(&config, *draws)?;
            for e in &outcome.entries {
                warn(stderr, &e.report.name, &e.warnings);
                if !e.passed {
                    let _ = writeln!(
                        stderr,
                        "FAIL {}/{} max_residual={} min_fidelity={}",
                        e.section,
                        e.report.name,
                        e.report.max_residual(),
                        e.report.min_fidelity()
                    );
                }
            }
            let body = match config.output_format {
                OutputFormat::Json => output::json(&outcome),
                OutputFormat::Csv => output::suite_csv(&outcome),
            };
            output::emit(&body, path, stdout)?;
            Ok(outcome.passed)
        }
        Command::Swap { a1, a2, delta } => {
            let result = protocols::full_swap(*a1, *a2, *delta, config.cutoff(), config.tolerance)?;
            protocol_output(&config, &result, Vec::new(), stdout, stderr)
        }
        Command::Clone { alpha } => {
            let result = protocols::imperfect_clone(*alpha, config.cutoff(), config.tolerance)?;
            let expected = alpha.modulus().powi(2) / 2.0;
            let marginals = (0..2)
                .map(|mode| Marginal {
                    mode: mode + 1,
                    mean_occupation: result.output.mean_occupation(mode),
                    expected,
                })
                .collect();
            protocol_output(&config, &result, marginals, stdout, stderr)
        }
        Command::Sweep {
            check,
            grid,
            axis,
            param,
            aux,
        } => {
            let spec = SweepSpec {
                check: *check,
                axis: *axis,
                grid: grid.clone(),
                param: *param,
                aux: *aux,
            };
            spec.validate()?;
            let rows = spec.run(config.n_max, config.margin, config.tolerance);
            for r in &rows {
                warn(stderr, &format!("row {}", r.index), &r.warnings);
                if let Some(e) = &r.error {
                    let _ = writeln!(stderr, "error: row {}: {e}", r.index);
                }
            }
            let passed = rows.iter().all(|r| r.passed);
            let body = match config.output_format {
                OutputFormat::Json => output::json(&SweepBody {
                    config: config.echo(),
                    check: *check,
                    axis: *axis,
                    passed,
                    rows: &rows,
                }),
                OutputFormat::Csv => output::sweep_csv(&spec, &rows),
            };
            output::emit(&body, path, stdout)?;
            Ok(passed)
        }
    }
}

fn protocol_output(
    config: &RunConfig,
    result: &protocols::TwoModeProtocolResult,
    marginals: Vec<Marginal>,
    stdout: &mut dyn Write,
    stderr: &mut dyn Write,
) -> Result<bool, Failure> {
    let report = &result.report;
    warn(stderr, &report.name, &report.warnings);
    let passed =
        result.fidelity >= 1.0 - config.tolerance && report.passed && report.warnings.is_empty();
    let body = match config.output_format {
        OutputFormat::Json => output::json(&ProtocolBody {
            config: config.echo(),
            passed,
            result,
            warnings: &report.warnings,
            marginals,
        }),
        OutputFormat::Csv => {
            let extra: Vec<(String, f64)> = marginals
                .iter()
                .flat_map(|m| {
                    [
                        (format!("mean_occupation_{}", m.mode), m.mean_occupation),
                        (format!("expected_occupation_{}", m.mode), m.expected),
                    ]
                })
                .collect();
            output::metrics_csv(report, &extra, passed)
        }
    };
    output::emit(&body, config.output_path.as_deref(), stdout)?;
    Ok(passed)
}
