//! Machine-readable run records and fixed-precision numeric formatting.
//!
//! Every command emits one [`RunRecord`]: the full parameter echo plus
//! results and solver diagnostics, so a run is reproducible from its own
//! output. Records serialize as JSON with sorted keys inside the maps;
//! floats are stored raw (shortest round-trip form), while human-facing
//! lines and CSV files use 12 significant digits.

use crate::problem_file::ProblemFile;
use serde::{Deserialize, Serialize};
use serde_json::{Map, Value};

/// 12 significant digits, scientific. Non-finite values spelled out.
pub fn sig12(x: f64) -> String {
    if x.is_nan() {
        "nan".to_string()
    } else if x.is_infinite() {
        if x > 0.0 { "inf" } else { "-inf" }.to_string()
    } else {
        format!("{x:.11e}")
    }
}

/// A float as a JSON value; non-finite values become strings since JSON has
/// no spelling for them.
pub fn num(x: f64) -> Value {
    match serde_json::Number::from_f64(x) {
        Some(n) => Value::Number(n),
        None => Value::String(sig12(x)),
    }
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
pub struct ProblemEcho {
    pub path: String,
    #[serde(flatten)]
    pub file: ProblemFile,
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
pub struct RunRecord {
    pub tool: String,
    pub version: String,
    pub timestamp: String,
    pub command: String,
    pub argv: Vec<String>,
    pub problem: ProblemEcho,
    pub parameters: Map<String, Value>,
    pub results: Map<String, Value>,
    pub diagnostics: Map<String, Value>,
}

impl RunRecord {
    pub fn new(command: &str, path: &str, file: ProblemFile) -> Self {
        Self {
            tool: "cdexp".to_string(),
            version: env!("CARGO_PKG_VERSION").to_string(),
            timestamp: chrono::Utc::now().to_rfc3339(),
            command: command.to_string(),
            argv: std::env::args().skip(1).collect(),
            problem: ProblemEcho {
                path: path.to_string(),
                file,
            },
            parameters: Map::new(),
            results: Map::new(),
            diagnostics: Map::new(),
        }
    }

    pub fn param(&mut self, key: &str, value: Value) -> &mut Self {
        self.parameters.insert(key.to_string(), value);
        self
    }

    pub fn result(&mut self, key: &str, value: Value) -> &mut Self {
        self.results.insert(key.to_string(), value);
        self
    }

    pub fn diagnostic(&mut self, key: &str, value: Value) -> &mut Self {
        self.diagnostics.insert(key.to_string(), value);
        self
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("record is always serializable")
    }
}

/// Output units for nat-valued quantities.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Units {
    Nats,
    Bits,
}

impl Units {
    pub fn from_flags(bits_flag: bool, file_units: Option<&str>) -> Self {
        if bits_flag || file_units == Some("bits") {
            Units::Bits
        } else {
            Units::Nats
        }
    }

    /// Converts a nat-valued quantity into these units.
    pub fn convert(self, nats: f64) -> f64 {
        match self {
            Units::Nats => nats,
            Units::Bits => nats / std::f64::consts::LN_2,
        }
    }

    pub fn label(self) -> &'static str {
        match self {
            Units::Nats => "nats",
            Units::Bits => "bits",
        }
    }
}
