//! Drift between representation snapshots and the steering-evaluation harness.

mod probe;
mod score;
mod series;
mod steering;

pub use probe::{train_linear_probe, LinearProbe, ProbeConfig};
pub use score::{build_drift_series, drift_score, AccuracyFn, DriftOptions};
pub use series::{DriftMetric, DriftSeries, MetricDrift};
pub use steering::{
    default_alphas, random_direction_control, shuffled_label_control, steering_direction, steering_sweep,
    RandomDirectionControl, SteeringResult,
};
