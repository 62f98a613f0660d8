//! The on-disk problem schema: a small TOML document with the source pmf,
//! the distortion table, optional symbol labels, and an optional default
//! output unit.
//!
//! ```toml
//! source = [0.5, 0.5]
//! distortion = [
//!   [0.0, 1.0],
//!   [1.0, 0.0],
//! ]
//! labels_x = ["0", "1"]   # optional
//! labels_y = ["0", "1"]   # optional
//! units = "nats"          # optional: "nats" (default) or "bits"
//! ```

use crate::CliError;
use cdexp_core::prob::{DistortionTable, Problem, SourcePmf};
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ProblemFile {
    pub source: Vec<f64>,
    pub distortion: Vec<Vec<f64>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub labels_x: Option<Vec<String>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub labels_y: Option<Vec<String>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub units: Option<String>,
}

/// Reads and validates a problem file. Errors are ranked by exit code:
/// missing file (2), malformed or unknown schema (3), values that fail
/// validation (4).
pub fn load(path: &str) -> Result<(Problem, ProblemFile), CliError> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| CliError::MissingFile(format!("cannot read {path}: {e}")))?;
    let file: ProblemFile = toml::from_str(&text)
        .map_err(|e| CliError::Schema(format!("{path}: {e}")))?;
    if let Some(units) = &file.units {
        if units != "nats" && units != "bits" {
            return Err(CliError::Schema(format!(
                "{path}: units must be \"nats\" or \"bits\", got \"{units}\""
            )));
        }
    }
    let source =
        SourcePmf::new(file.source.clone()).map_err(|e| CliError::Validation(e.to_string()))?;
    let distortion = DistortionTable::new(file.distortion.clone())
        .map_err(|e| CliError::Validation(e.to_string()))?;
    let problem = Problem::new(source, distortion)
        .and_then(|p| p.with_labels(file.labels_x.clone(), file.labels_y.clone()))
        .map_err(|e| CliError::Validation(e.to_string()))?;
    if !problem.distortion().has_zero_row() {
        eprintln!(
            "warning: {path}: some source symbol has no zero-distortion reproduction; \
             solvers still run, but zero-distortion identities do not apply"
        );
    }
    Ok((problem, file))
}
