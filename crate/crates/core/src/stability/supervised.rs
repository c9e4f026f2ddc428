use nalgebra::{DMatrix, DVector};
use rand::Rng;

use super::split::{class_centroids, subsample_rows};
use super::{LabelVector, SheshaConfig};
use crate::error::{Error, Result};
use crate::numerics::rng::sample_without_replacement;
use crate::numerics::{compute_rdm, spearman, zscore_columns, DistanceKind, EmbeddingMatrix, RandomStream};

pub const LDA_SHRINKAGE: f64 = 0.1;

const MAX_REDRAWS: usize = 10;

/// Spearman between the embedding RDM and the binary same/different-class RDM.
pub fn shesha_supervised_rdm(x: &EmbeddingMatrix, y: &LabelVector, cfg: &SheshaConfig) -> Result<f64> {
    cfg.validate()?;
    y.check_rows(x.nrows())?;
    if y.n_classes() < 2 {
        return Err(Error::TooFewClasses { min: 2, got: y.n_classes() });
    }
    let (x, y) = match subsample_rows(x, cfg) {
        Some(rows) => (x.select_rows(&rows), y.select(&rows)?),
        None => (x.clone(), y.clone()),
    };
    let rdm = compute_rdm(&x, cfg.distance)?;
    let n = x.nrows();
    let mut target = Vec::with_capacity(rdm.condensed().len());
    for i in 0..n {
        for j in (i + 1)..n {
            target.push(if y.get(i) == y.get(j) { 0.0 } else { 1.0 });
        }
    }
    spearman(rdm.condensed(), &target)
}

/// Supervised RDM alignment computed on column-z-scored features.
pub fn shesha_zscore(x: &EmbeddingMatrix, y: &LabelVector, cfg: &SheshaConfig) -> Result<f64> {
    shesha_supervised_rdm(&zscore_columns(x)?, y, cfg)
}

/// Between-class over total sum of squares.
pub fn shesha_variance_ratio(x: &EmbeddingMatrix, y: &LabelVector) -> Result<f64> {
    y.check_rows(x.nrows())?;
    let m = x.matrix();
    let mean = m.row_mean();
    let total: f64 = m.row_iter().map(|r| (r - &mean).norm_squared()).sum();
    if total <= 0.0 {
        return Err(Error::ZeroTotalVariance);
    }
    let groups = y.indices_by_class();
    let centroids = class_centroids(m, &groups);
    let between: f64 =
        groups.iter().enumerate().map(|(c, rows)| rows.len() as f64 * (centroids.row(c) - &mean).norm_squared()).sum();
    Ok(between / total)
}

/// Per-class subsample of `round(frac * n_c)` rows, clamped to `[min, n_c]`.
pub(crate) fn stratified_subsample<R: Rng>(groups: &[Vec<usize>], frac: f64, min: usize, rng: &mut R) -> Vec<usize> {
    let mut out = Vec::new();
    for rows in groups {
        let k = ((frac * rows.len() as f64).round() as usize).clamp(min.min(rows.len()), rows.len());
        out.extend(sample_without_replacement(rng, rows.len(), k).into_iter().map(|p| rows[p]));
    }
    out.sort_unstable();
    out
}

fn check_frac(b: usize, frac: f64) -> Result<()> {
    if b == 0 {
        return Err(Error::InvalidParameter("bootstrap iterations must be >= 1".into()));
    }
    if !(frac > 0.0 && frac <= 1.0) {
        return Err(Error::InvalidParameter("subsample fraction must be in (0, 1]".into()));
    }
    Ok(())
}

fn separation_once(x: &EmbeddingMatrix, y: &LabelVector, rows: &[usize]) -> Result<Option<f64>> {
    let sub = x.select_rows(rows);
    let rdm = compute_rdm(&sub, DistanceKind::Cosine)?;
    let (mut within, mut nw, mut between, mut nb) = (0.0, 0usize, 0.0, 0usize);
    let mut idx = 0;
    for i in 0..rows.len() {
        for j in (i + 1)..rows.len() {
            let v = rdm.condensed()[idx];
            idx += 1;
            if y.get(rows[i]) == y.get(rows[j]) {
                within += v;
                nw += 1;
            } else {
                between += v;
                nb += 1;
            }
        }
    }
    if nw == 0 || nb == 0 {
        return Ok(None);
    }
    let within = within / nw as f64;
    if within <= 0.0 {
        return Err(Error::Degenerate);
    }
    Ok(Some((between / nb as f64) / within))
}

/// Mean between-class over mean within-class cosine distance, averaged over
/// `b` stratified subsamples of fraction `frac`.
pub fn shesha_class_separation(
    x: &EmbeddingMatrix,
    y: &LabelVector,
    b: usize,
    frac: f64,
    stream: &RandomStream,
) -> Result<f64> {
    y.check_rows(x.nrows())?;
    check_frac(b, frac)?;
    if y.n_classes() < 2 {
        return Err(Error::TooFewClasses { min: 2, got: y.n_classes() });
    }
    let groups = y.indices_by_class();
    let mut sum = 0.0;
    for it in 0..b {
        let mut rng = stream.rng(it as u64);
        let mut score = None;
        for _ in 0..=MAX_REDRAWS {
            let rows = stratified_subsample(&groups, frac, 1, &mut rng);
            if let Some(s) = separation_once(x, y, &rows)? {
                score = Some(s);
                break;
            }
        }
        sum += score.ok_or(Error::EmptyWithinPairs(it))?;
    }
    Ok(sum / b as f64)
}

/// Unit Fisher direction `S^-1 (mu_1 - mu_0)` with the pooled within-class
/// covariance shrunk toward `(tr S / d) I`. Sign is fixed so the direction
/// points from class 0 to class 1.
pub fn lda_direction(x: &EmbeddingMatrix, y: &LabelVector, shrinkage: f64) -> Result<DVector<f64>> {
    y.check_rows(x.nrows())?;
    if y.n_classes() != 2 {
        return Err(Error::UnsupportedClassCount(y.n_classes()));
    }
    if !(0.0..=1.0).contains(&shrinkage) {
        return Err(Error::InvalidParameter("shrinkage must be in [0, 1]".into()));
    }
    let m = x.matrix();
    let d = m.ncols();
    let groups = y.indices_by_class();
    let mu = class_centroids(m, &groups);
    let mut sw = DMatrix::<f64>::zeros(d, d);
    for i in 0..m.nrows() {
        let r = (m.row(i) - mu.row(y.get(i))).transpose();
        sw.ger(1.0, &r, &r, 1.0);
    }
    sw /= m.nrows() as f64;
    let tr = sw.trace();
    let mut s = sw * (1.0 - shrinkage);
    for j in 0..d {
        s[(j, j)] += shrinkage * tr / d as f64;
    }
    let diff = (mu.row(1) - mu.row(0)).transpose();
    let w = s.cholesky().ok_or(Error::SingularWithinCovariance)?.solve(&diff);
    let norm = w.norm();
    if !norm.is_finite() || norm < 1e-12 {
        return Err(Error::SingularWithinCovariance);
    }
    Ok(w / norm)
}

/// Mean `|w^T w_b|` between the full-data LDA direction and directions refit
/// on `b` stratified subsamples.
pub fn shesha_lda_subspace(
    x: &EmbeddingMatrix,
    y: &LabelVector,
    b: usize,
    frac: f64,
    stream: &RandomStream,
) -> Result<f64> {
    check_frac(b, frac)?;
    let w = lda_direction(x, y, LDA_SHRINKAGE)?;
    y.require_min_class_size(2)?;
    let groups = y.indices_by_class();
    let mut sum = 0.0;
    for it in 0..b {
        let rows = stratified_subsample(&groups, frac, 2, &mut stream.rng(it as u64));
        let wb = lda_direction(&x.select_rows(&rows), &y.select(&rows)?, LDA_SHRINKAGE)?;
        sum += w.dot(&wb).abs();
    }
    Ok(sum / b as f64)
}
