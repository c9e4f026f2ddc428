use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub const TOOL_VERSION: &str = env!("CARGO_PKG_VERSION");

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CiEntry {
    pub low: f64,
    pub high: f64,
    pub iterations: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ResultEntry {
    pub metric: String,
    pub value: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub ci: Option<CiEntry>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub per_split: Option<Vec<f64>>,
    #[serde(default)]
    pub aux: serde_json::Value,
}

impl ResultEntry {
    pub fn new(metric: impl Into<String>, value: f64) -> Self {
        Self { metric: metric.into(), value, ci: None, per_split: None, aux: serde_json::Value::Null }
    }

    pub fn with_aux(mut self, aux: serde_json::Value) -> Self {
        self.aux = aux;
        self
    }
}

/// JSON report emitted by every subcommand.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReportFile {
    pub tool_version: String,
    pub command: String,
    pub seed: u64,
    pub params: serde_json::Value,
    pub results: Vec<ResultEntry>,
    pub warnings: Vec<String>,
    /// Wall-clock seconds; only present when requested.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub timing_seconds: Option<f64>,
}

impl ReportFile {
    pub fn new(command: &str, seed: u64, params: serde_json::Value) -> Self {
        Self {
            tool_version: TOOL_VERSION.to_string(),
            command: command.to_string(),
            seed,
            params,
            results: Vec::new(),
            warnings: Vec::new(),
            timing_seconds: None,
        }
    }

    /// Pretty JSON. Floats use shortest round-trip digits (at most 17
    /// significant), so parsing the text restores every value exactly.
    pub fn to_json(&self) -> Result<String> {
        if let Some(r) = self.results.iter().find(|r| !r.value.is_finite()) {
            return Err(Error::InvalidParameter(format!("non-finite value for '{}'", r.metric)));
        }
        let mut s = serde_json::to_string_pretty(self).map_err(|e| Error::Format(e.to_string()))?;
        s.push('\n');
        Ok(s)
    }

    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| Error::Format(e.to_string()))
    }

    pub fn write(&self, path: &Path) -> Result<()> {
        std::fs::write(path, self.to_json()?).map_err(|e| Error::Io(format!("{}: {e}", path.display())))
    }
}

/// The shipped JSON schema for [`ReportFile`].
pub const REPORT_SCHEMA: &str = include_str!("../../schema/report.schema.json");
