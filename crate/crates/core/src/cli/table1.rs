//! The seven-element sequence converging to 1/2 in radix 2.

use std::fmt::Write as _;

use serde::Serialize;

use crate::exact::ExactValue;
use crate::sdrep::{DigitSet, SignedDigitNumber};
use crate::stability::{build_stable_trace, DigitTrace, IterateSequence};

pub const VALUES: [(i64, i64); 7] = [(1, 1), (1, 8), (3, 4), (3, 8), (9, 16), (15, 32), (33, 64)];

/// Redundant strings listed alongside the sequence; one valid choice among
/// many.
pub const LISTED_REDUNDANT: [&str; 7] =
    ["1.000", "1.[-1][-1][-1]", "1.[-1]10", "1.[-1]0[-1]", "1.[-1]001", "1.[-1]000[-1]", "1.[-1]00001"];

const BINARY_FRACTION_DIGITS: usize = 6;

#[derive(Debug, Clone, Serialize)]
pub struct Table1Row {
    pub element: usize,
    pub value: ExactValue,
    pub standard: String,
    pub binary: String,
    pub listed: String,
    pub listed_value: ExactValue,
    pub constructed: String,
    pub constructed_digits: SignedDigitNumber,
    pub stable_prefix_len: usize,
    pub distance: ExactValue,
}

#[derive(Debug, Clone, Serialize)]
pub struct Table1Report {
    pub fixed_point: ExactValue,
    pub rows: Vec<Table1Row>,
    /// Every listed string evaluates to its element's value.
    pub listed_strings_match: bool,
    /// Every rendered string parses back to the same digits.
    pub round_trip_ok: bool,
    /// First element (1-based) whose digits of weight `>= 2^-d` never change
    /// again, for `d = 1, 2, 3`.
    pub first_stable_element: Vec<Option<usize>>,
}

impl Table1Report {
    pub fn all_checks_pass(&self) -> bool {
        self.listed_strings_match && self.round_trip_ok
    }
}

pub fn sequence() -> IterateSequence {
    let values = VALUES.iter().map(|&(n, d)| ExactValue::ratio(n, d)).collect();
    IterateSequence::from_scalars(values, ExactValue::ratio(1, 2)).expect("non-empty scalar sequence")
}

pub fn trace() -> DigitTrace {
    let ds = DigitSet::maximal(2).expect("radix 2");
    build_stable_trace(&sequence(), ds, 64).expect("sequence is Fejér monotone").remove(0)
}

fn round_trips(x: &SignedDigitNumber, marked: &str) -> bool {
    let line_ok = x.to_string().parse::<SignedDigitNumber>().as_ref() == Ok(x);
    let pos_ok = SignedDigitNumber::parse_positional(marked, x.digit_set()).as_ref() == Ok(x);
    line_ok && pos_ok
}

pub fn report() -> Table1Report {
    let ds = DigitSet::maximal(2).expect("radix 2");
    let trace = trace();
    let mut listed_ok = true;
    let mut round_trip_ok = true;
    let rows = trace
        .representations
        .iter()
        .enumerate()
        .map(|(i, rep)| {
            let value = rep.value();
            let listed =
                SignedDigitNumber::parse_positional(LISTED_REDUNDANT[i], ds).expect("listed strings are well formed");
            listed_ok &= listed.value() == value;
            round_trip_ok &= round_trips(&listed, &listed.to_positional());
            let constructed = rep.to_positional_marked(Some(trace.stable_prefix[i].min(rep.len())));
            round_trip_ok &= round_trips(rep, &constructed);
            let mut padded = rep.digits().to_vec();
            padded.resize(padded.len().max(1 + BINARY_FRACTION_DIGITS), 0);
            let binary = SignedDigitNumber::new(ds, 0, padded).expect("same digits").to_nonredundant();
            Table1Row {
                element: i + 1,
                standard: value.to_decimal_string(),
                binary: binary.to_positional(),
                listed: LISTED_REDUNDANT[i].to_string(),
                listed_value: listed.value(),
                constructed,
                constructed_digits: rep.clone(),
                stable_prefix_len: trace.stable_prefix[i],
                distance: trace.distances[i].clone(),
                value,
            }
        })
        .collect();
    Table1Report {
        fixed_point: ExactValue::ratio(1, 2),
        rows,
        listed_strings_match: listed_ok,
        round_trip_ok,
        first_stable_element: (1..=3).map(|d| trace.first_stable_index(d).map(|i| i + 1)).collect(),
    }
}

pub fn render_text(r: &Table1Report) -> String {
    let mut out = String::new();
    let _ = writeln!(
        out,
        "Fejér monotone sequence converging to {} (radix 2, digits {{-1, 0, 1}})\n",
        r.fixed_point.to_decimal_string()
    );
    let _ = writeln!(
        out,
        "{:>2}  {:<9} {:<9} {:<17} {:<24} |x - 0.5|",
        "#", "standard", "binary", "listed redundant", "constructed (| = stable)"
    );
    for row in &r.rows {
        let _ = writeln!(
            out,
            "{:>2}  {:<9} {:<9} {:<17} {:<24} {}",
            row.element,
            row.standard,
            row.binary,
            row.listed,
            row.constructed,
            row.distance.to_decimal_string()
        );
    }
    let _ = writeln!(out);
    let ok = |b: bool| if b { "ok" } else { "FAILED" };
    let _ = writeln!(out, "listed strings evaluate to their values: {}", ok(r.listed_strings_match));
    let _ = writeln!(out, "render/parse round trip: {}", ok(r.round_trip_ok));
    for (d, first) in r.first_stable_element.iter().enumerate() {
        let at = first.map_or_else(|| "never".to_string(), |e| format!("element {e}"));
        let _ = writeln!(out, "digits of weight >= 2^-{} stable from {at}", d + 1);
    }
    out
}

pub fn render_csv(r: &Table1Report) -> Result<String, csv::Error> {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record([
        "element",
        "value_num",
        "value_den",
        "standard",
        "binary",
        "listed_redundant",
        "constructed",
        "stable_prefix_len",
        "distance_num",
        "distance_den",
    ])?;
    for row in &r.rows {
        w.write_record([
            row.element.to_string(),
            row.value.numer().to_string(),
            row.value.denom().to_string(),
            row.standard.clone(),
            row.binary.clone(),
            row.listed.clone(),
            row.constructed.clone(),
            row.stable_prefix_len.to_string(),
            row.distance.numer().to_string(),
            row.distance.denom().to_string(),
        ])?;
    }
    let bytes = w.into_inner().map_err(|e| e.into_error())?;
    Ok(String::from_utf8(bytes).expect("csv output is utf-8"))
}
