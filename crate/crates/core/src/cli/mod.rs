//! `sdstable` command-line front end.
//!
//! Exit status: 0 on success, 2 for unusable input, 3 when the input is
//! well formed but a mathematical precondition fails (non-contractive map
//! under `--require-stable`, non-monotone sequence, singular system, zero
//! derivative).

mod experiments;
mod input;
pub mod table1;

use std::ffi::OsString;
use std::fmt::Write as _;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use thiserror::Error;

use crate::sdrep::{DigitSet, SdError};
use crate::solvers::SolverError;
use crate::stability::StabilityError;

pub use experiments::{DigitReport, IterationReport, NewtonSummary, StationarySummary, TraceSettings, TraceSummary};

/// Environment variable capping digits per number in traces.
pub const MAX_DIGITS_ENV: &str = "SDSTABLE_MAX_DIGITS";
pub const DEFAULT_MAX_DIGITS: usize = 4096;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Input(String),
    #[error("{0}")]
    Precondition(String),
    #[error("{}: {source}", path.display())]
    Io { path: PathBuf, source: std::io::Error },
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Input(_) | CliError::Io { .. } => 2,
            CliError::Precondition(_) => 3,
        }
    }
}

impl From<SdError> for CliError {
    fn from(e: SdError) -> Self {
        CliError::Input(e.to_string())
    }
}

impl From<StabilityError> for CliError {
    fn from(e: StabilityError) -> Self {
        match e {
            StabilityError::NotFejerMonotone { .. }
            | StabilityError::NotContractive(_)
            | StabilityError::ExactRepresentationExceedsBudget { .. } => CliError::Precondition(e.to_string()),
            _ => CliError::Input(e.to_string()),
        }
    }
}

impl From<SolverError> for CliError {
    fn from(e: SolverError) -> Self {
        match e {
            SolverError::SingularSplitting { .. }
            | SolverError::SingularSystem
            | SolverError::DerivativeZero { .. }
            | SolverError::NoBracket { .. } => CliError::Precondition(e.to_string()),
            SolverError::Sequence(inner) => inner.into(),
            _ => CliError::Input(e.to_string()),
        }
    }
}

#[derive(Debug, Parser)]
#[command(name = "sdstable", version, about = "Stable leading digits of Fejér monotone sequences")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Text,
    Csv,
    Json,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Print the worked radix-2 example converging to 1/2.
    Table1 {
        #[arg(long, value_enum, default_value_t = Format::Text)]
        format: Format,
    },
    /// Run a stationary linear solver and trace its digits.
    Stationary {
        #[arg(long)]
        problem: PathBuf,
        #[arg(long, default_value_t = 2)]
        radix: u32,
        /// Digit set bound; must be radix - 1.
        #[arg(long)]
        gamma: Option<u32>,
        /// Report stabilisation for 1..=digits fractional digits.
        #[arg(long, default_value_t = 4)]
        digits: u64,
        /// Exit with status 3 unless the iteration is a contraction.
        #[arg(long)]
        require_stable: bool,
        #[arg(long)]
        out: PathBuf,
    },
    /// Run Newton's method on a polynomial and trace its digits.
    Newton {
        #[arg(long)]
        problem: PathBuf,
        #[arg(long, default_value_t = 2)]
        radix: u32,
        #[arg(long)]
        gamma: Option<u32>,
        #[arg(long, default_value_t = 4)]
        digits: u64,
        #[arg(long)]
        out: PathBuf,
    },
    /// Trace a sequence read from a JSON file.
    Trace {
        #[arg(long)]
        sequence: PathBuf,
        #[arg(long, default_value_t = 2)]
        radix: u32,
        #[arg(long)]
        gamma: Option<u32>,
        #[arg(long)]
        out: PathBuf,
    },
}

fn max_digits() -> Result<usize, CliError> {
    match std::env::var(MAX_DIGITS_ENV) {
        Err(_) => Ok(DEFAULT_MAX_DIGITS),
        Ok(v) => match v.trim().parse::<usize>() {
            Ok(n) if n > 0 => Ok(n),
            _ => Err(CliError::Input(format!("{MAX_DIGITS_ENV} must be a positive integer, got `{v}`"))),
        },
    }
}

fn settings(radix: u32, gamma: Option<u32>) -> Result<TraceSettings, CliError> {
    let digit_set = DigitSet::new(radix, gamma.unwrap_or(radix.saturating_sub(1)))?;
    if !digit_set.is_maximally_redundant() {
        return Err(SdError::NotMaximallyRedundant { radix, gamma: digit_set.gamma() }.into());
    }
    Ok(TraceSettings { digit_set, max_digits: max_digits()? })
}

fn check_digits(digits: u64) -> Result<(), CliError> {
    if digits == 0 {
        return Err(CliError::Input("--digits must be at least 1".into()));
    }
    Ok(())
}

fn describe_digits(out: &mut String, per_digit: &[DigitReport]) {
    let show = |v: Option<usize>| v.map_or_else(|| "-".to_string(), |i| i.to_string());
    let _ = writeln!(out, "{:>3}  {:>15}  {:>8}  {:>9}", "D", "within r^-D at", "stable at", "predicted");
    for r in per_digit {
        let _ = writeln!(
            out,
            "{:>3}  {:>15}  {:>8}  {:>9}",
            r.digits,
            show(r.within_distance),
            show(r.observed),
            r.predicted.map_or_else(|| "-".to_string(), |p| p.to_string())
        );
    }
}

fn describe_trace(out: &mut String, t: &TraceSummary) {
    let _ = writeln!(out, "elements: {}, Fejér monotone: {}", t.elements, t.fejer_monotone);
    let prefixes: Vec<String> =
        t.iterations.iter().map(|i| i.stable_prefix_len.map_or_else(|| "-".to_string(), |s| s.to_string())).collect();
    let _ = writeln!(out, "stable prefix per element: {}", prefixes.join(" "));
    if t.truncated {
        let _ = writeln!(out, "note: some representations hit the digit cap and are truncated");
    }
    if !t.files.is_empty() {
        let _ = writeln!(out, "wrote: {} summary.json", t.files.join(" "));
    }
}

/// Executes a parsed command and returns what it prints on success.
pub fn run(cli: Cli) -> Result<String, CliError> {
    let mut out = String::new();
    match cli.command {
        Command::Table1 { format } => {
            let report = table1::report();
            match format {
                Format::Text => out = table1::render_text(&report),
                Format::Csv => {
                    out =
                        table1::render_csv(&report).map_err(|e| CliError::Input(format!("csv encoding failed: {e}")))?
                }
                Format::Json => out = serde_json::to_string_pretty(&report).expect("report serializes") + "\n",
            }
            if !report.all_checks_pass() {
                return Err(CliError::Precondition(format!("{out}self-check failed")));
            }
        }
        Command::Stationary { problem, radix, gamma, digits, require_stable, out: dir } => {
            check_digits(digits)?;
            let s = settings(radix, gamma)?;
            let summary = experiments::stationary(input::read_json(&problem)?, &s, digits, require_stable, &dir)?;
            let _ = writeln!(out, "Lipschitz constant L = {} ({})", summary.lipschitz, summary.verdict);
            describe_trace(&mut out, &summary.trace);
            describe_digits(&mut out, &summary.per_digit);
        }
        Command::Newton { problem, radix, gamma, digits, out: dir } => {
            check_digits(digits)?;
            let s = settings(radix, gamma)?;
            let summary = experiments::newton(input::read_json(&problem)?, &s, digits, &dir)?;
            let est = summary
                .contraction_estimate
                .as_ref()
                .map_or_else(|| "unavailable (f' vanishes on the grid)".to_string(), |c| format!("{:.6e}", c.to_f64()));
            let _ = writeln!(out, "sampled contraction estimate: {est}");
            if let Some(k) = summary.halted_at {
                let _ = writeln!(out, "note: derivative vanished at iterate {k}; run truncated");
            }
            describe_trace(&mut out, &summary.trace);
            describe_digits(&mut out, &summary.per_digit);
        }
        Command::Trace { sequence, radix, gamma, out: dir } => {
            let s = settings(radix, gamma)?;
            let summary = experiments::trace(input::read_json(&sequence)?, &s, &dir)?;
            describe_trace(&mut out, &summary);
        }
    }
    Ok(out)
}

/// Parses `args`, runs the command, prints its output and maps the result
/// to an exit code.
pub fn main_with_args<I, T>(args: I) -> ExitCode
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 2 } else { 0 });
        }
    };
    match run(cli) {
        Ok(text) => {
            print!("{text}");
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("sdstable: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
