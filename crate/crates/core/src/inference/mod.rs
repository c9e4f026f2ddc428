//! Resampling inference and detection analytics.

mod detection;
mod resampling;

pub use detection::{
    detection_threshold, early_warning_compare, false_alarm_rate, roc_auc, sensitivity_at_fpr, EarlyWarning,
    DETECTION_THRESHOLD, STABLE_ACCURACY_DROP,
};
pub use resampling::{
    bootstrap_ci, jackknife_loo, partial_spearman, percentile, permutation_null_centroid, BootstrapResult,
    PermutationNull, BOOTSTRAP_ITERATIONS, NULL_PERMUTATIONS,
};
