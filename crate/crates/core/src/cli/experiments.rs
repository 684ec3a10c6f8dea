use std::fs;
use std::path::Path;

use serde::Serialize;

use super::input::{NewtonProblem, SequenceFile, StationaryProblem};
use super::CliError;
use crate::exact::{inf_norm_diff, ExactValue};
use crate::sdrep::{DigitSet, OpenInterval};
use crate::solvers::{
    newton_contraction, run_newton, RationalMatrix, RationalPolynomial, SplittingKind, StationarySplitting,
};
use crate::stability::{
    build_stable_trace_with, fejer_violation, predict_stability_index, stable_digit_count, trace_csv, trace_json,
    DigitTrace, IterateSequence, StableDigits, TraceOptions,
};

const CONTRACTION_SAMPLES: usize = 64;

#[derive(Debug, Clone, Copy)]
pub struct TraceSettings {
    pub digit_set: DigitSet,
    pub max_digits: usize,
}

impl TraceSettings {
    fn options(&self) -> TraceOptions {
        TraceOptions {
            max_digits_per_step: self.max_digits,
            max_anchor_digits: self.max_digits,
            allow_truncation: true,
        }
    }

    fn radix(&self) -> u32 {
        self.digit_set.radix()
    }
}

/// Per-iteration row of a summary.
#[derive(Debug, Clone, Serialize)]
pub struct IterationReport {
    pub iteration: usize,
    pub distance: ExactValue,
    /// Largest `D` with distance `< r^-D`; `null` when the distance is at
    /// least 1, `"unbounded"` at the fixed point.
    pub stable_digit_count: StableDigitsJson,
    /// Minimum over components.
    pub stable_prefix_len: Option<usize>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(untagged)]
pub enum StableDigitsJson {
    Count(Option<u64>),
    Unbounded(&'static str),
}

impl From<StableDigits> for StableDigitsJson {
    fn from(s: StableDigits) -> Self {
        match s {
            StableDigits::Unresolved => StableDigitsJson::Count(None),
            StableDigits::Digits(d) => StableDigitsJson::Count(Some(d)),
            StableDigits::Unbounded => StableDigitsJson::Unbounded("unbounded"),
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct DigitReport {
    pub digits: u64,
    /// First iteration within `r^-D` of the fixed point.
    pub within_distance: Option<usize>,
    /// First iteration from which every component keeps its digits of
    /// weight `>= r^-D`.
    pub observed: Option<usize>,
    /// A-priori bound from the Lipschitz constant, when it is below 1.
    pub predicted: Option<u64>,
}

#[derive(Debug, Clone, Serialize)]
pub struct TraceSummary {
    pub radix: u32,
    pub gamma: u32,
    pub fixed_point: Vec<ExactValue>,
    pub elements: usize,
    pub fejer_monotone: bool,
    pub first_violation: Option<usize>,
    pub truncated: bool,
    pub files: Vec<String>,
    pub iterations: Vec<IterationReport>,
}

#[derive(Debug, Clone, Serialize)]
pub struct StationarySummary {
    pub splitting: SplittingKind,
    pub lipschitz: ExactValue,
    pub contractive: bool,
    pub verdict: String,
    pub per_digit: Vec<DigitReport>,
    pub trace: TraceSummary,
}

#[derive(Debug, Clone, Serialize)]
pub struct NewtonSummary {
    pub polynomial: Vec<ExactValue>,
    pub digit_budget: u32,
    /// Sampled `max |f f'' / f'^2|` over the hull of the iterates and the
    /// fixed point; `null` if `f'` vanishes on the grid.
    pub contraction_estimate: Option<ExactValue>,
    pub root_enclosure: Option<(ExactValue, ExactValue)>,
    pub halted_at: Option<usize>,
    pub per_digit: Vec<DigitReport>,
    pub trace: TraceSummary,
}

/// Traces of a sequence plus its summary; `traces` is empty when the
/// sequence is not Fejér monotone.
pub struct TraceRun {
    pub traces: Vec<DigitTrace>,
    pub summary: TraceSummary,
}

pub fn trace_sequence(seq: &IterateSequence, settings: &TraceSettings) -> Result<TraceRun, CliError> {
    let violation = fejer_violation(seq);
    let traces = if violation.is_none() {
        build_stable_trace_with(seq, settings.digit_set, &settings.options())?
    } else {
        Vec::new()
    };
    let iterations = seq
        .iterates()
        .iter()
        .enumerate()
        .map(|(n, x)| IterationReport {
            iteration: n,
            distance: inf_norm_diff(x, seq.fixed_point()),
            stable_digit_count: stable_digit_count(x, seq.fixed_point(), settings.radix()).into(),
            stable_prefix_len: traces.iter().map(|t| t.stable_prefix[n]).min(),
        })
        .collect();
    let summary = TraceSummary {
        radix: settings.radix(),
        gamma: settings.digit_set.gamma(),
        fixed_point: seq.fixed_point().to_vec(),
        elements: seq.len(),
        fejer_monotone: violation.is_none(),
        first_violation: violation,
        truncated: traces.iter().any(|t| t.truncated.iter().any(|&b| b)),
        files: Vec::new(),
        iterations,
    };
    Ok(TraceRun { traces, summary })
}

fn write_file(path: &Path, contents: &str) -> Result<(), CliError> {
    fs::write(path, contents).map_err(|source| CliError::Io { path: path.to_owned(), source })
}

/// Writes `trace_c{i}.csv` and `trace_c{i}.json` per component and records
/// the file names in the summary.
fn write_traces(out: &Path, run: &mut TraceRun) -> Result<(), CliError> {
    fs::create_dir_all(out).map_err(|source| CliError::Io { path: out.to_owned(), source })?;
    for t in &run.traces {
        let csv_name = format!("trace_c{}.csv", t.component_index);
        let json_name = format!("trace_c{}.json", t.component_index);
        let csv = trace_csv(t).map_err(|e| CliError::Input(format!("csv encoding failed: {e}")))?;
        let json = trace_json(t).map_err(|e| CliError::Input(format!("json encoding failed: {e}")))?;
        write_file(&out.join(&csv_name), &csv)?;
        write_file(&out.join(&json_name), &json)?;
        run.summary.files.push(csv_name);
        run.summary.files.push(json_name);
    }
    Ok(())
}

fn write_summary<T: Serialize>(out: &Path, summary: &T) -> Result<(), CliError> {
    let json = serde_json::to_string_pretty(summary).expect("summary serializes");
    write_file(&out.join("summary.json"), &json)
}

fn digit_reports(
    seq: &IterateSequence,
    traces: &[DigitTrace],
    target: u64,
    radix: u32,
    lipschitz: Option<&ExactValue>,
) -> Vec<DigitReport> {
    let threshold = |d: u64| ExactValue::radix_pow(radix, -(d as i64));
    let distances = seq.distances();
    (1..=target)
        .map(|d| {
            let observed = if traces.is_empty() {
                None
            } else {
                traces.iter().map(|t| t.first_stable_index(d)).try_fold(0usize, |acc, i| i.map(|i| acc.max(i)))
            };
            let predicted = match (lipschitz, seq.iterates().get(1)) {
                (Some(l), Some(x1)) => predict_stability_index(l, &seq.iterates()[0], x1, d, radix).ok(),
                _ => None,
            };
            DigitReport {
                digits: d,
                within_distance: distances.iter().position(|x| x < &threshold(d)),
                observed,
                predicted,
            }
        })
        .collect()
}

pub fn stationary(
    problem: StationaryProblem,
    settings: &TraceSettings,
    target: u64,
    require_stable: bool,
    out: &Path,
) -> Result<StationarySummary, CliError> {
    let a = RationalMatrix::from_rows(problem.a)?;
    let split = StationarySplitting::new(a, problem.b, problem.splitting.clone())?;
    if problem.x0.len() != split.dimension() {
        return Err(CliError::Input(format!("x0 has {} entries, expected {}", problem.x0.len(), split.dimension())));
    }
    let lipschitz = split.lipschitz();
    let contractive = lipschitz < ExactValue::one();
    let seq = split.run(problem.x0, problem.iters)?;
    let mut run = trace_sequence(&seq, settings)?;
    write_traces(out, &mut run)?;
    let per_digit = digit_reports(&seq, &run.traces, target, settings.radix(), contractive.then_some(&lipschitz));
    let summary = StationarySummary {
        splitting: problem.splitting,
        verdict: if contractive { "contractive: digit stability guaranteed" } else { "no guarantee" }.to_string(),
        lipschitz,
        contractive,
        per_digit,
        trace: run.summary,
    };
    write_summary(out, &summary)?;
    if require_stable && !summary.contractive {
        return Err(CliError::Precondition(format!(
            "no guarantee: Lipschitz constant {} is not below 1",
            summary.lipschitz.to_decimal_string()
        )));
    }
    Ok(summary)
}

pub fn newton(
    problem: NewtonProblem,
    settings: &TraceSettings,
    target: u64,
    out: &Path,
) -> Result<NewtonSummary, CliError> {
    let f = RationalPolynomial::new(problem.poly);
    if f.degree().unwrap_or(0) == 0 {
        return Err(CliError::Input("polynomial must have degree at least 1".into()));
    }
    let run = run_newton(&f, problem.x0, problem.iters, problem.digit_budget, settings.radix(), problem.fixed_point)?;
    let seq = &run.sequence;
    let hull = seq.component(0).into_iter().chain(seq.fixed_point().iter().cloned());
    let (lo, hi) = hull.fold((None, None), |(lo, hi): (Option<ExactValue>, Option<ExactValue>), x| {
        (Some(lo.map_or(x.clone(), |l| l.min(x.clone()))), Some(hi.map_or(x.clone(), |h| h.max(x))))
    });
    let (lo, hi) = (lo.expect("non-empty"), hi.expect("non-empty"));
    let pad = ExactValue::radix_pow(settings.radix(), -i64::from(problem.digit_budget));
    let interval = OpenInterval::new(&lo - &pad, &hi + &pad).expect("padded hull is non-degenerate");
    let contraction_estimate = newton_contraction(&f, &interval, CONTRACTION_SAMPLES).ok();

    let mut trace_run = trace_sequence(seq, settings)?;
    write_traces(out, &mut trace_run)?;
    let summary = NewtonSummary {
        polynomial: f.coefficients().to_vec(),
        digit_budget: problem.digit_budget,
        contraction_estimate,
        root_enclosure: run.root_enclosure.clone(),
        halted_at: run.halted_at,
        per_digit: digit_reports(seq, &trace_run.traces, target, settings.radix(), None),
        trace: trace_run.summary,
    };
    write_summary(out, &summary)?;
    if let Some(element) = summary.trace.first_violation {
        return Err(CliError::Precondition(format!(
            "Newton iterates are not Fejér monotone: element {element} moves away from the root"
        )));
    }
    Ok(summary)
}

pub fn trace(file: SequenceFile, settings: &TraceSettings, out: &Path) -> Result<TraceSummary, CliError> {
    let seq = IterateSequence::new(file.iterates, file.fixed_point)?;
    let mut run = trace_sequence(&seq, settings)?;
    if let Some(element) = run.summary.first_violation {
        return Err(CliError::Precondition(format!(
            "sequence is not Fejér monotone: element {element} moves away from the fixed point"
        )));
    }
    write_traces(out, &mut run)?;
    write_summary(out, &run.summary)?;
    Ok(run.summary)
}
