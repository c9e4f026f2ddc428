use serde::{Deserialize, Serialize};

use crate::drift::{DriftMetric, DriftSeries};
use crate::error::{Error, Result};
use crate::numerics::average_ranks;

pub const DETECTION_THRESHOLD: f64 = 0.05;
pub const STABLE_ACCURACY_DROP: f64 = 0.01;

/// Smallest level whose drift reaches `threshold`.
pub fn detection_threshold(series: &DriftSeries, metric: DriftMetric, threshold: f64) -> Result<Option<f64>> {
    let drift = series.drift(metric)?;
    Ok(series.levels().iter().zip(drift).find(|(_, d)| **d >= threshold).map(|(l, _)| *l))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum EarlyWarning {
    First(DriftMetric),
    Tie,
}

/// Which of two metrics crosses `threshold` at a lower level.
pub fn early_warning_compare(
    a: &DriftSeries,
    metric_a: DriftMetric,
    b: &DriftSeries,
    metric_b: DriftMetric,
    threshold: f64,
) -> Result<EarlyWarning> {
    if a.levels() != b.levels() {
        return Err(Error::LevelMismatch);
    }
    let ta = detection_threshold(a, metric_a, threshold)?;
    let tb = detection_threshold(b, metric_b, threshold)?;
    Ok(match (ta, tb) {
        (Some(x), Some(y)) if x < y => EarlyWarning::First(metric_a),
        (Some(x), Some(y)) if y < x => EarlyWarning::First(metric_b),
        (Some(_), None) => EarlyWarning::First(metric_a),
        (None, Some(_)) => EarlyWarning::First(metric_b),
        _ => EarlyWarning::Tie,
    })
}

fn class_counts(scores: &[f64], truth: &[bool]) -> Result<(usize, usize)> {
    if scores.len() != truth.len() {
        return Err(Error::LengthMismatch(scores.len(), truth.len()));
    }
    if scores.iter().any(|s| !s.is_finite()) {
        return Err(Error::InvalidParameter("scores must be finite".into()));
    }
    let pos = truth.iter().filter(|t| **t).count();
    let neg = truth.len() - pos;
    if pos == 0 || neg == 0 {
        return Err(Error::SingleClass);
    }
    Ok((pos, neg))
}

/// Area under the ROC curve via the rank-sum statistic (ties count one half).
pub fn roc_auc(scores: &[f64], truth: &[bool]) -> Result<f64> {
    let (pos, neg) = class_counts(scores, truth)?;
    let ranks = average_ranks(scores);
    let rank_sum: f64 = ranks.iter().zip(truth).filter(|(_, t)| **t).map(|(r, _)| r).sum();
    let u = rank_sum - (pos * (pos + 1)) as f64 / 2.0;
    Ok(u / (pos * neg) as f64)
}

/// Highest true-positive rate over thresholds (`score >= t` is positive)
/// whose false-positive rate stays within `fpr`.
pub fn sensitivity_at_fpr(scores: &[f64], truth: &[bool], fpr: f64) -> Result<f64> {
    let (pos, neg) = class_counts(scores, truth)?;
    let mut thresholds: Vec<f64> = scores.to_vec();
    thresholds.sort_by(|a, b| b.total_cmp(a));
    thresholds.dedup();
    let mut best = 0.0;
    for t in thresholds {
        let (mut tp, mut fp) = (0usize, 0usize);
        for (s, y) in scores.iter().zip(truth) {
            if *s >= t {
                if *y {
                    tp += 1;
                } else {
                    fp += 1;
                }
            }
        }
        if fp as f64 / neg as f64 > fpr {
            break;
        }
        best = tp as f64 / pos as f64;
    }
    Ok(best)
}

/// Fraction of functionally stable points (accuracy drop from the first
/// level below `stable_acc_drop`) whose drift reaches `drift_threshold`.
/// A self-referenced level 0 is not counted.
pub fn false_alarm_rate(
    series: &DriftSeries,
    metric: DriftMetric,
    drift_threshold: f64,
    stable_acc_drop: f64,
) -> Result<f64> {
    let acc = series.accuracy().ok_or(Error::MissingAccuracy)?;
    let drift = series.drift(metric)?;
    let base = acc[0];
    let start = usize::from(series.levels()[0] == 0.0);
    let (mut stable, mut alarms) = (0usize, 0usize);
    for i in start..acc.len() {
        if base - acc[i] < stable_acc_drop {
            stable += 1;
            if drift[i] >= drift_threshold {
                alarms += 1;
            }
        }
    }
    if stable == 0 {
        return Err(Error::NoStablePoints);
    }
    Ok(alarms as f64 / stable as f64)
}
