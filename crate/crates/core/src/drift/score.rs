use serde::{Deserialize, Serialize};

use super::series::{DriftMetric, DriftSeries};
use crate::error::{Error, Result};
use crate::numerics::{replicate_seed, DistanceKind, EmbeddingMatrix, RandomStream};
use crate::similarity::{
    linear_cka, mmd_rbf, procrustes_similarity, rdm_pearson, rsa_spearman, sliced_wasserstein, SLICED_PROJECTIONS,
};
use crate::synthetic::{apply_encoder, EncoderKind, EncoderTransform};

/// Knobs shared by every drift metric.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DriftOptions {
    /// Distance for the RDM-based metrics (shesha, rdm_pearson).
    pub distance: DistanceKind,
    pub projections: usize,
    pub seed: u64,
}

impl Default for DriftOptions {
    fn default() -> Self {
        Self { distance: DistanceKind::Cosine, projections: SLICED_PROJECTIONS, seed: 320 }
    }
}

/// Drift of `current` from `baseline` on a row-aligned probe set:
/// `1 - similarity` for similarity metrics, the raw distance otherwise.
pub fn drift_score(
    baseline: &EmbeddingMatrix,
    current: &EmbeddingMatrix,
    metric: DriftMetric,
    opts: &DriftOptions,
) -> Result<f64> {
    if baseline.nrows() != current.nrows() {
        return Err(Error::RowCountMismatch(baseline.nrows(), current.nrows()));
    }
    let v = match metric {
        DriftMetric::Shesha => 1.0 - rsa_spearman(baseline, current, opts.distance)?,
        DriftMetric::Cka => 1.0 - linear_cka(baseline, current)?,
        DriftMetric::Procrustes => 1.0 - procrustes_similarity(baseline, current)?,
        DriftMetric::RdmPearson => 1.0 - rdm_pearson(baseline, current, opts.distance)?,
        DriftMetric::Wasserstein => {
            sliced_wasserstein(baseline, current, opts.projections, &RandomStream::new(opts.seed))?
        }
        DriftMetric::Mmd => mmd_rbf(baseline, current, None)?,
    };
    // identical snapshots should read exactly zero, not -1e-16
    Ok(if v.abs() < 1e-12 { 0.0 } else { v })
}

/// Task accuracy evaluated on a perturbed snapshot.
pub type AccuracyFn<'a> = &'a (dyn Fn(&EmbeddingMatrix) -> Result<f64> + Sync);

/// Gaussian-noise sweep: level `i` perturbs the baseline with
/// `noise(sigma = levels[i])` seeded by `replicate_seed(opts.seed, i)`.
/// A level of exactly 0 is the unperturbed baseline.
pub fn build_drift_series(
    baseline: &EmbeddingMatrix,
    levels: &[f64],
    metrics: &[DriftMetric],
    opts: &DriftOptions,
    accuracy_fn: Option<AccuracyFn<'_>>,
) -> Result<DriftSeries> {
    let mut series = DriftSeries::new(levels.to_vec())?;
    if levels[0] < 0.0 {
        return Err(Error::InvalidParameter("noise levels must be >= 0".into()));
    }
    let snapshots: Vec<EmbeddingMatrix> = levels
        .iter()
        .enumerate()
        .map(|(i, &sigma)| {
            if sigma == 0.0 {
                return Ok(baseline.clone());
            }
            let t = EncoderTransform::new(EncoderKind::Noise { sigma }, replicate_seed(opts.seed, i as u64));
            apply_encoder(baseline, &t)
        })
        .collect::<Result<_>>()?;
    for &m in metrics {
        let values = snapshots.iter().map(|s| drift_score(baseline, s, m, opts)).collect::<Result<Vec<_>>>()?;
        series = series.with_metric(m, values)?;
    }
    if let Some(f) = accuracy_fn {
        let acc = snapshots.iter().map(f).collect::<Result<Vec<_>>>()?;
        series = series.with_accuracy(acc)?;
    }
    Ok(series)
}
