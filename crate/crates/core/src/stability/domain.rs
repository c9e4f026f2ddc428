use nalgebra::{DMatrix, RowDVector};
use serde::{Deserialize, Serialize};

use super::split::class_centroids;
use super::LabelVector;
use crate::error::{Error, Result};
use crate::numerics::{
    compute_rdm, l2_normalize_rows, spearman, zca_whiten, DistanceKind, EmbeddingMatrix, Rdm, Whitener,
};

pub const COHERENCE_WHITENING_SHRINKAGE: f64 = 0.1;

const MIN_CELLS: usize = 10;
const SHIFT_EPS: f64 = 1e-6;

/// Condition-centroid RDMs (cosine) from even- and odd-position trials of
/// each condition, trials taken in row order.
pub fn trial_split_rdms(x: &EmbeddingMatrix, conditions: &LabelVector) -> Result<(Rdm, Rdm)> {
    conditions.check_rows(x.nrows())?;
    if conditions.n_classes() < 3 {
        return Err(Error::TooFewConditions(conditions.n_classes()));
    }
    let groups = conditions.indices_by_class();
    if let Some((c, g)) = groups.iter().enumerate().find(|(_, g)| g.len() < 2) {
        return Err(Error::ConditionTooSmall { condition: c, count: g.len() });
    }
    let even: Vec<Vec<usize>> = groups.iter().map(|g| g.iter().copied().step_by(2).collect()).collect();
    let odd: Vec<Vec<usize>> = groups.iter().map(|g| g.iter().copied().skip(1).step_by(2).collect()).collect();
    let a = EmbeddingMatrix::from_matrix_unchecked(class_centroids(x.matrix(), &even));
    let b = EmbeddingMatrix::from_matrix_unchecked(class_centroids(x.matrix(), &odd));
    Ok((compute_rdm(&a, DistanceKind::Cosine)?, compute_rdm(&b, DistanceKind::Cosine)?))
}

/// Spearman agreement of even/odd trial condition RDMs.
pub fn shesha_trial_split(x: &EmbeddingMatrix, conditions: &LabelVector) -> Result<f64> {
    let (a, b) = trial_split_rdms(x, conditions)?;
    spearman(a.condensed(), b.condensed())
}

/// Trial-split stability after shrinkage ZCA whitening.
pub fn wuc(x: &EmbeddingMatrix, conditions: &LabelVector, shrinkage: f64) -> Result<f64> {
    conditions.check_rows(x.nrows())?;
    shesha_trial_split(&zca_whiten(x, shrinkage)?, conditions)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "lowercase")]
pub enum CoherenceVariant {
    #[default]
    Euclidean,
    /// Shifts measured after whitening fitted on the control population.
    Whitened,
    /// Each cell's reference is the centroid of its k nearest control rows.
    Knn(usize),
}

fn knn_centroids(control: &DMatrix<f64>, cells: &DMatrix<f64>, k: usize) -> DMatrix<f64> {
    let k = k.clamp(1, control.nrows());
    let d = control.ncols();
    let mut out = DMatrix::zeros(cells.nrows(), d);
    for i in 0..cells.nrows() {
        let mut dist: Vec<(f64, usize)> =
            (0..control.nrows()).map(|r| ((control.row(r) - cells.row(i)).norm_squared(), r)).collect();
        dist.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)));
        for &(_, r) in &dist[..k] {
            for j in 0..d {
                out[(i, j)] += control[(r, j)];
            }
        }
        for j in 0..d {
            out[(i, j)] /= k as f64;
        }
    }
    out
}

/// Mean cosine between each cell's shift from the control reference and the
/// mean shift, over cells whose shift exceeds 1e-6.
pub fn perturbation_coherence(
    control: &EmbeddingMatrix,
    perturbed: &EmbeddingMatrix,
    variant: CoherenceVariant,
) -> Result<f64> {
    if control.ncols() != perturbed.ncols() {
        return Err(Error::DimMismatch(control.ncols(), perturbed.ncols()));
    }
    if perturbed.nrows() < MIN_CELLS {
        return Err(Error::TooFewCells(perturbed.nrows()));
    }
    let shifts: DMatrix<f64> = match variant {
        CoherenceVariant::Euclidean => {
            let c = control.matrix().row_mean();
            row_shifts(perturbed.matrix(), |_| c.clone())
        }
        CoherenceVariant::Whitened => {
            let w = Whitener::fit(control, COHERENCE_WHITENING_SHRINKAGE)?;
            let wc = w.apply(control)?;
            let wp = w.apply(perturbed)?;
            let c = wc.matrix().row_mean();
            row_shifts(wp.matrix(), |_| c.clone())
        }
        CoherenceVariant::Knn(k) => {
            if k == 0 {
                return Err(Error::InvalidParameter("knn k must be >= 1".into()));
            }
            let refs = knn_centroids(control.matrix(), perturbed.matrix(), k);
            row_shifts(perturbed.matrix(), |i| refs.row(i).into_owned())
        }
    };
    let mean = shifts.row_mean();
    let mnorm = mean.norm();
    if mnorm <= SHIFT_EPS {
        return Err(Error::DegenerateShift);
    }
    let (mut sum, mut count) = (0.0, 0usize);
    for r in shifts.row_iter() {
        let n = r.norm();
        if n > SHIFT_EPS {
            sum += r.dot(&mean) / (n * mnorm);
            count += 1;
        }
    }
    Ok(sum / count as f64)
}

fn row_shifts(cells: &DMatrix<f64>, reference: impl Fn(usize) -> RowDVector<f64>) -> DMatrix<f64> {
    let mut out = cells.clone();
    for i in 0..cells.nrows() {
        let r = reference(i);
        out.row_mut(i).zip_apply(&r, |v, c| *v -= c);
    }
    out
}

/// `1 / (1 + mean distance)` between unit-normalized perturbed rows and the
/// unit-normalized base.
pub fn latent_perturbation_stability(base: &[f64], perturbed: &EmbeddingMatrix) -> Result<f64> {
    if base.len() != perturbed.ncols() {
        return Err(Error::DimMismatch(base.len(), perturbed.ncols()));
    }
    let bn = base.iter().map(|v| v * v).sum::<f64>().sqrt();
    if bn <= 1e-12 {
        return Err(Error::ZeroNormRow(0));
    }
    let unit = l2_normalize_rows(perturbed)?;
    let mut total = 0.0;
    for r in unit.matrix().row_iter() {
        let s: f64 = r.iter().zip(base).map(|(p, b)| (p - b / bn).powi(2)).sum();
        total += s.sqrt();
    }
    Ok(1.0 / (1.0 + total / perturbed.nrows() as f64))
}

/// Cosine between centroids of L2-normalized rows before and after `split_index`.
pub fn centroid_drift(x: &EmbeddingMatrix, split_index: usize) -> Result<f64> {
    if split_index == 0 || split_index >= x.nrows() {
        return Err(Error::InvalidParameter(format!("split index {split_index} must be in 1..{}", x.nrows())));
    }
    let unit = l2_normalize_rows(x)?;
    let m = unit.matrix();
    let early = m.rows(0, split_index).row_mean();
    let late = m.rows(split_index, m.nrows() - split_index).row_mean();
    let (ne, nl) = (early.norm(), late.norm());
    if ne <= 1e-12 || nl <= 1e-12 {
        return Err(Error::ZeroCentroid);
    }
    Ok((early.dot(&late) / (ne * nl)).clamp(-1.0, 1.0))
}
