use nalgebra::DMatrix;
use rayon::prelude::*;

use super::{LabelVector, SheshaConfig, StabilityScore};
use crate::error::{Error, Result};
use crate::numerics::rdm::cross_dissimilarity;
use crate::numerics::rng::{permutation, sample_without_replacement};
use crate::numerics::{compute_rdm, spearman, DistanceKind, EmbeddingMatrix};

pub const DEFAULT_ANCHORS: usize = 32;

const SUBSAMPLE_TAG: u64 = 0x5ab5;

/// Draws one `max_samples` subset (from the base stream) when `n` exceeds the cap.
pub(crate) fn subsample_rows(x: &EmbeddingMatrix, cfg: &SheshaConfig) -> Option<Vec<usize>> {
    match cfg.max_samples {
        Some(cap) if x.nrows() > cap => {
            let mut rng = cfg.stream().substream(SUBSAMPLE_TAG).rng(0);
            Some(sample_without_replacement(&mut rng, x.nrows(), cap))
        }
        _ => None,
    }
}

fn capped<'a>(x: &'a EmbeddingMatrix, cfg: &SheshaConfig) -> std::borrow::Cow<'a, EmbeddingMatrix> {
    match subsample_rows(x, cfg) {
        Some(rows) => std::borrow::Cow::Owned(x.select_rows(&rows)),
        None => std::borrow::Cow::Borrowed(x),
    }
}

/// Mean Spearman agreement between RDMs built on random disjoint halves of
/// the feature columns.
pub fn shesha_feature_split(x: &EmbeddingMatrix, cfg: &SheshaConfig) -> Result<StabilityScore> {
    cfg.validate()?;
    let d = x.ncols();
    if d < 2 {
        return Err(Error::TooFewFeatures(d));
    }
    if x.nrows() < 4 {
        return Err(Error::TooFewSamples { min: 4, got: x.nrows() });
    }
    let x = capped(x, cfg);
    let stream = cfg.stream();
    let first = d.div_ceil(2);
    let scores: Vec<Result<f64>> = (0..cfg.n_splits)
        .into_par_iter()
        .map(|k| {
            let perm = permutation(&mut stream.rng(k as u64), d);
            let mut a = perm[..first].to_vec();
            let mut b = perm[first..].to_vec();
            a.sort_unstable();
            b.sort_unstable();
            let ra = compute_rdm(&x.select_columns(&a), cfg.distance)?;
            let rb = compute_rdm(&x.select_columns(&b), cfg.distance)?;
            spearman(ra.condensed(), rb.condensed())
        })
        .collect();
    StabilityScore::from_splits(scores, cfg.degenerate_policy)
}

/// Second-order (anchor x anchor) dissimilarity built from one half's samples:
/// entry (p, q) is the correlation distance between anchor p's and anchor q's
/// distance profiles to that half.
fn anchor_profile_rdm(x: &DMatrix<f64>, anchors: &[usize], half: &[usize], kind: DistanceKind) -> Result<Vec<f64>> {
    let a = x.select_rows(anchors);
    let h = x.select_rows(half);
    let profiles = cross_dissimilarity(&a, &h, kind)?;
    let second = cross_dissimilarity(&profiles, &profiles, DistanceKind::Correlation).map_err(|_| Error::Degenerate)?;
    let m = anchors.len();
    let mut out = Vec::with_capacity(m * (m - 1) / 2);
    for p in 0..m {
        for q in (p + 1)..m {
            out.push(second[(p, q)]);
        }
    }
    Ok(out)
}

/// Sample-split score for an explicit anchor set and pair of halves.
pub fn sample_split_once(
    x: &EmbeddingMatrix,
    anchors: &[usize],
    half_a: &[usize],
    half_b: &[usize],
    kind: DistanceKind,
) -> Result<f64> {
    if anchors.len() < 3 {
        return Err(Error::TooFewSamples { min: 3, got: anchors.len() });
    }
    let ra = anchor_profile_rdm(x.matrix(), anchors, half_a, kind)?;
    let rb = anchor_profile_rdm(x.matrix(), anchors, half_b, kind)?;
    spearman(&ra, &rb)
}

/// Mean agreement of anchor-based second-order RDMs across disjoint sample halves.
pub fn shesha_sample_split(x: &EmbeddingMatrix, cfg: &SheshaConfig, anchors: usize) -> Result<StabilityScore> {
    cfg.validate()?;
    if anchors < 3 {
        return Err(Error::InvalidParameter("need at least 3 anchors".into()));
    }
    let x = capped(x, cfg);
    let n = x.nrows();
    if n < 3 * anchors {
        return Err(Error::TooFewSamples { min: 3 * anchors, got: n });
    }
    let stream = cfg.stream();
    let scores: Vec<Result<f64>> = (0..cfg.n_splits)
        .into_par_iter()
        .map(|k| {
            let perm = permutation(&mut stream.rng(k as u64), n);
            let (anchor_set, rest) = perm.split_at(anchors);
            let mid = rest.len() / 2;
            sample_split_once(&x, anchor_set, &rest[..mid], &rest[mid..], cfg.distance)
        })
        .collect();
    StabilityScore::from_splits(scores, cfg.degenerate_policy)
}

pub(crate) fn class_centroids(x: &DMatrix<f64>, groups: &[Vec<usize>]) -> DMatrix<f64> {
    let d = x.ncols();
    let mut out = DMatrix::zeros(groups.len(), d);
    for (c, rows) in groups.iter().enumerate() {
        for &r in rows {
            for j in 0..d {
                out[(c, j)] += x[(r, j)];
            }
        }
        let len = rows.len() as f64;
        for j in 0..d {
            out[(c, j)] /= len;
        }
    }
    out
}

/// Agreement of class-centroid RDMs across class-balanced disjoint halves.
pub fn shesha_label_conditioned(x: &EmbeddingMatrix, y: &LabelVector, cfg: &SheshaConfig) -> Result<StabilityScore> {
    cfg.validate()?;
    y.check_rows(x.nrows())?;
    if y.n_classes() < 3 {
        return Err(Error::TooFewClasses { min: 3, got: y.n_classes() });
    }
    y.require_min_class_size(2)?;
    let by_class = y.indices_by_class();
    let stream = cfg.stream();
    let scores: Vec<Result<f64>> = (0..cfg.n_splits)
        .into_par_iter()
        .map(|k| {
            let mut rng = stream.rng(k as u64);
            let mut half_a = Vec::with_capacity(by_class.len());
            let mut half_b = Vec::with_capacity(by_class.len());
            for rows in &by_class {
                let perm = permutation(&mut rng, rows.len());
                let mid = rows.len() / 2;
                half_a.push(perm[..mid].iter().map(|&p| rows[p]).collect::<Vec<_>>());
                half_b.push(perm[mid..].iter().map(|&p| rows[p]).collect::<Vec<_>>());
            }
            let ca = EmbeddingMatrix::from_matrix_unchecked(class_centroids(x.matrix(), &half_a));
            let cb = EmbeddingMatrix::from_matrix_unchecked(class_centroids(x.matrix(), &half_b));
            let ra = compute_rdm(&ca, cfg.distance)?;
            let rb = compute_rdm(&cb, cfg.distance)?;
            spearman(ra.condensed(), rb.condensed())
        })
        .collect();
    StabilityScore::from_splits(scores, cfg.degenerate_policy)
}
