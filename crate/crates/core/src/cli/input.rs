use std::fs;
use std::path::Path;

use serde::de::DeserializeOwned;
use serde::Deserialize;

use super::CliError;
use crate::exact::ExactValue;
use crate::solvers::SplittingKind;

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct StationaryProblem {
    #[serde(rename = "A")]
    pub a: Vec<Vec<ExactValue>>,
    pub b: Vec<ExactValue>,
    pub splitting: SplittingKind,
    pub x0: Vec<ExactValue>,
    pub iters: usize,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct NewtonProblem {
    pub poly: Vec<ExactValue>,
    pub x0: ExactValue,
    pub iters: usize,
    pub digit_budget: u32,
    #[serde(default)]
    pub fixed_point: Option<ExactValue>,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SequenceFile {
    pub iterates: Vec<Vec<ExactValue>>,
    pub fixed_point: Vec<ExactValue>,
}

pub fn read_json<T: DeserializeOwned>(path: &Path) -> Result<T, CliError> {
    let text = fs::read_to_string(path).map_err(|source| CliError::Io { path: path.to_owned(), source })?;
    serde_json::from_str(&text).map_err(|e| CliError::Input(format!("{}: {e}", path.display())))
}
