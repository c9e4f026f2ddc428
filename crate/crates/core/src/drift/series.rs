use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Metrics for which drift between two snapshots is defined.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DriftMetric {
    Shesha,
    Cka,
    Procrustes,
    RdmPearson,
    Wasserstein,
    Mmd,
}

impl DriftMetric {
    pub const ALL: [DriftMetric; 6] = [
        DriftMetric::Shesha,
        DriftMetric::Cka,
        DriftMetric::Procrustes,
        DriftMetric::RdmPearson,
        DriftMetric::Wasserstein,
        DriftMetric::Mmd,
    ];

    pub fn as_str(&self) -> &'static str {
        match self {
            DriftMetric::Shesha => "shesha",
            DriftMetric::Cka => "cka",
            DriftMetric::Procrustes => "procrustes",
            DriftMetric::RdmPearson => "rdm_pearson",
            DriftMetric::Wasserstein => "wasserstein",
            DriftMetric::Mmd => "mmd",
        }
    }

    /// True for metrics reported as `1 - similarity`.
    pub fn is_complement(&self) -> bool {
        !matches!(self, DriftMetric::Wasserstein | DriftMetric::Mmd)
    }
}

impl fmt::Display for DriftMetric {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for DriftMetric {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        DriftMetric::ALL.into_iter().find(|m| m.as_str() == s).ok_or_else(|| Error::UnknownMetric(s.to_string()))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MetricDrift {
    pub metric: DriftMetric,
    pub values: Vec<f64>,
}

/// Drift values per perturbation level, with optional task accuracy.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DriftSeries {
    levels: Vec<f64>,
    metrics: Vec<MetricDrift>,
    #[serde(skip_serializing_if = "Option::is_none")]
    accuracy: Option<Vec<f64>>,
}

impl DriftSeries {
    pub fn new(levels: Vec<f64>) -> Result<Self> {
        if levels.is_empty() {
            return Err(Error::EmptySeries);
        }
        if levels.iter().any(|l| !l.is_finite()) || levels.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::UnorderedLevels);
        }
        Ok(Self { levels, metrics: Vec::new(), accuracy: None })
    }

    /// Adds (or replaces) one metric's per-level drift.
    pub fn with_metric(mut self, metric: DriftMetric, values: Vec<f64>) -> Result<Self> {
        if values.len() != self.levels.len() {
            return Err(Error::LevelMismatch);
        }
        if let Some(p) = values.iter().position(|v| !v.is_finite()) {
            return Err(Error::NonFinite { row: p, col: 0 });
        }
        self.metrics.retain(|m| m.metric != metric);
        self.metrics.push(MetricDrift { metric, values });
        Ok(self)
    }

    pub fn with_accuracy(mut self, accuracy: Vec<f64>) -> Result<Self> {
        if accuracy.len() != self.levels.len() {
            return Err(Error::LevelMismatch);
        }
        if accuracy.iter().any(|a| !(0.0..=1.0).contains(a)) {
            return Err(Error::InvalidParameter("accuracy values must be in [0, 1]".into()));
        }
        self.accuracy = Some(accuracy);
        Ok(self)
    }

    pub fn levels(&self) -> &[f64] {
        &self.levels
    }

    pub fn metrics(&self) -> &[MetricDrift] {
        &self.metrics
    }

    pub fn accuracy(&self) -> Option<&[f64]> {
        self.accuracy.as_deref()
    }

    pub fn drift(&self, metric: DriftMetric) -> Result<&[f64]> {
        self.metrics
            .iter()
            .find(|m| m.metric == metric)
            .map(|m| m.values.as_slice())
            .ok_or_else(|| Error::UnknownMetric(metric.as_str().to_string()))
    }
}
