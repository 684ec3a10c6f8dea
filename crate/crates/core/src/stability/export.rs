//! CSV and JSON trace files.

use serde::{Deserialize, Serialize};

use super::DigitTrace;
use crate::exact::ExactValue;
use crate::sdrep::SignedDigitNumber;

/// One iteration of a component trace, as written to JSON.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TraceRecord {
    pub iteration: usize,
    pub value: ExactValue,
    pub distance: ExactValue,
    pub representation: SignedDigitNumber,
    pub stable_prefix_len: usize,
    pub truncated: bool,
}

impl DigitTrace {
    pub fn records(&self) -> Vec<TraceRecord> {
        self.representations
            .iter()
            .enumerate()
            .map(|(i, rep)| TraceRecord {
                iteration: i,
                value: rep.value(),
                distance: self.distances[i].clone(),
                representation: rep.clone(),
                stable_prefix_len: self.stable_prefix[i],
                truncated: self.truncated[i],
            })
            .collect()
    }
}

/// Columns: iteration, value_num, value_den, distance_num, distance_den,
/// sd_string, stable_prefix_len.
pub fn trace_csv(trace: &DigitTrace) -> Result<String, csv::Error> {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record([
        "iteration",
        "value_num",
        "value_den",
        "distance_num",
        "distance_den",
        "sd_string",
        "stable_prefix_len",
    ])?;
    for r in trace.records() {
        w.write_record([
            r.iteration.to_string(),
            r.value.numer().to_string(),
            r.value.denom().to_string(),
            r.distance.numer().to_string(),
            r.distance.denom().to_string(),
            r.representation.to_string(),
            r.stable_prefix_len.to_string(),
        ])?;
    }
    let bytes = w.into_inner().map_err(|e| e.into_error())?;
    Ok(String::from_utf8(bytes).expect("csv output is utf-8"))
}

pub fn trace_json(trace: &DigitTrace) -> serde_json::Result<String> {
    serde_json::to_string_pretty(&trace.records())
}
