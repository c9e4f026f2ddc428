//! Geometric stability (Shesha) variants and supervised-geometry baselines.
//!
//! Split-averaged variants draw split `k` from `cfg.stream().rng(k)`, so the
//! per-split scores and their mean are identical for any worker count.

mod baselines;
mod domain;
mod labels;
mod split;
mod supervised;

use serde::{Deserialize, Serialize};

use crate::numerics::{DistanceKind, RandomStream};

pub use baselines::{anisotropy, fisher_discriminant, silhouette_score};
pub use domain::{
    centroid_drift, latent_perturbation_stability, perturbation_coherence, shesha_trial_split, trial_split_rdms, wuc,
    CoherenceVariant, COHERENCE_WHITENING_SHRINKAGE,
};
pub use labels::LabelVector;
pub use split::{
    sample_split_once, shesha_feature_split, shesha_label_conditioned, shesha_sample_split, DEFAULT_ANCHORS,
};
pub use supervised::{
    lda_direction, shesha_class_separation, shesha_lda_subspace, shesha_supervised_rdm, shesha_variance_ratio,
    shesha_zscore, LDA_SHRINKAGE,
};

/// What to do when a split yields a constant RDM half.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "lowercase")]
pub enum DegeneratePolicy {
    Error,
    /// Score the split as 0 and count it.
    #[default]
    Zero,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SheshaConfig {
    pub n_splits: usize,
    pub distance: DistanceKind,
    pub max_samples: Option<usize>,
    pub seed: u64,
    pub degenerate_policy: DegeneratePolicy,
}

impl Default for SheshaConfig {
    fn default() -> Self {
        Self {
            n_splits: 30,
            distance: DistanceKind::Cosine,
            max_samples: Some(1600),
            seed: 320,
            degenerate_policy: DegeneratePolicy::Zero,
        }
    }
}

impl SheshaConfig {
    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = seed;
        self
    }

    pub fn with_splits(mut self, k: usize) -> Self {
        self.n_splits = k;
        self
    }

    pub fn with_distance(mut self, kind: DistanceKind) -> Self {
        self.distance = kind;
        self
    }

    pub fn with_max_samples(mut self, cap: Option<usize>) -> Self {
        self.max_samples = cap;
        self
    }

    pub fn with_policy(mut self, p: DegeneratePolicy) -> Self {
        self.degenerate_policy = p;
        self
    }

    pub fn stream(&self) -> RandomStream {
        RandomStream::new(self.seed)
    }

    pub(crate) fn validate(&self) -> crate::Result<()> {
        if self.n_splits == 0 {
            return Err(crate::Error::InvalidParameter("n_splits must be >= 1".into()));
        }
        if matches!(self.max_samples, Some(m) if m < 4) {
            return Err(crate::Error::InvalidParameter("max_samples must be >= 4".into()));
        }
        Ok(())
    }
}

/// Split-averaged stability score.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StabilityScore {
    pub value: f64,
    pub per_split: Vec<f64>,
    pub degenerate_splits: usize,
}

impl StabilityScore {
    pub(crate) fn from_splits(scores: Vec<crate::Result<f64>>, policy: DegeneratePolicy) -> crate::Result<Self> {
        let mut per_split = Vec::with_capacity(scores.len());
        let mut degenerate_splits = 0;
        for s in scores {
            match s {
                Ok(v) => per_split.push(v),
                Err(crate::Error::Degenerate) if policy == DegeneratePolicy::Zero => {
                    degenerate_splits += 1;
                    per_split.push(0.0);
                }
                Err(e) => return Err(e),
            }
        }
        // index-ordered sum keeps the mean independent of scheduling
        let value = per_split.iter().sum::<f64>() / per_split.len() as f64;
        Ok(Self { value, per_split, degenerate_splits })
    }
}
