use nalgebra::{DMatrix, DVector};

use super::SimilarityValue;
use crate::error::{Error, Result};
use crate::numerics::linalg::sorted_svd;
use crate::numerics::EmbeddingMatrix;

pub const PWCKA_VARIANCE: f64 = 0.99;

fn same_rows(x: &EmbeddingMatrix, y: &EmbeddingMatrix) -> Result<()> {
    if x.nrows() != y.nrows() {
        return Err(Error::RowCountMismatch(x.nrows(), y.nrows()));
    }
    Ok(())
}

fn cka_centered(xc: &DMatrix<f64>, yc: &DMatrix<f64>) -> Result<f64> {
    let n = xc.nrows();
    // pick the cheaper of the feature-space and Gram-space forms
    let (xy, xx, yy) = if n < xc.ncols().max(yc.ncols()) {
        let k = xc * xc.transpose();
        let l = yc * yc.transpose();
        (k.dot(&l), k.norm(), l.norm())
    } else {
        let c = xc.transpose() * yc;
        let a = xc.transpose() * xc;
        let b = yc.transpose() * yc;
        (c.norm_squared(), a.norm(), b.norm())
    };
    if xx <= 0.0 || yy <= 0.0 {
        return Err(Error::ZeroNorm);
    }
    Ok(xy / (xx * yy))
}

/// Linear CKA on column-centered representations.
pub fn linear_cka(x: &EmbeddingMatrix, y: &EmbeddingMatrix) -> Result<f64> {
    same_rows(x, y)?;
    cka_centered(&x.centered(), &y.centered())
}

/// Unbiased HSIC estimator of two Gram matrices (diagonals are zeroed here).
fn hsic_unbiased(k: &DMatrix<f64>, l: &DMatrix<f64>) -> f64 {
    let n = k.nrows() as f64;
    let mut k = k.clone();
    let mut l = l.clone();
    k.fill_diagonal(0.0);
    l.fill_diagonal(0.0);
    let ones = DVector::from_element(k.nrows(), 1.0);
    let kr = &k * &ones;
    let lr = &l * &ones;
    let trace_kl = k.dot(&l);
    let sums = kr.sum() * lr.sum() / ((n - 1.0) * (n - 2.0));
    let cross = 2.0 / (n - 2.0) * kr.dot(&lr);
    (trace_kl + sums - cross) / (n * (n - 3.0))
}

/// CKA normalized from the unbiased HSIC estimator.
pub fn debiased_cka(x: &EmbeddingMatrix, y: &EmbeddingMatrix) -> Result<f64> {
    same_rows(x, y)?;
    if x.nrows() < 4 {
        return Err(Error::TooFewSamples { min: 4, got: x.nrows() });
    }
    let xc = x.centered();
    let yc = y.centered();
    let k = &xc * xc.transpose();
    let l = &yc * yc.transpose();
    let kk = hsic_unbiased(&k, &k);
    let ll = hsic_unbiased(&l, &l);
    if kk <= 0.0 || ll <= 0.0 {
        return Err(Error::ZeroNorm);
    }
    Ok(hsic_unbiased(&k, &l) / (kk * ll).sqrt())
}

/// Smallest number of components whose squared singular values reach `threshold`.
fn components_for(s: &[f64], threshold: f64) -> usize {
    let total: f64 = s.iter().map(|v| v * v).sum();
    let mut acc = 0.0;
    for (i, v) in s.iter().enumerate() {
        acc += v * v;
        if acc >= threshold * total * (1.0 - 1e-12) {
            return i + 1;
        }
    }
    s.len()
}

/// Linear CKA after truncating both inputs to their shared effective rank.
/// `aux` carries the number of components kept.
pub fn pwcka_effective_rank(
    x: &EmbeddingMatrix,
    y: &EmbeddingMatrix,
    variance_threshold: f64,
) -> Result<SimilarityValue> {
    same_rows(x, y)?;
    if x.nrows() < 4 {
        return Err(Error::TooFewSamples { min: 4, got: x.nrows() });
    }
    if !(variance_threshold > 0.0 && variance_threshold <= 1.0) {
        return Err(Error::InvalidParameter("variance threshold must be in (0, 1]".into()));
    }
    let sx = sorted_svd(&x.centered());
    let sy = sorted_svd(&y.centered());
    if sx.s[0] <= 0.0 || sy.s[0] <= 0.0 {
        return Err(Error::ZeroNorm);
    }
    let k = components_for(&sx.s, variance_threshold).min(components_for(&sy.s, variance_threshold));
    let scaled = |svd: &crate::numerics::linalg::SortedSvd| {
        let mut u = svd.u.columns(0, k).into_owned();
        for (j, mut col) in u.column_iter_mut().enumerate() {
            col *= svd.s[j];
        }
        u
    };
    let value = cka_centered(&scaled(&sx), &scaled(&sy))?;
    Ok(SimilarityValue { metric: "pwcka".into(), value, aux: Some(k) })
}

/// Nuclear norm of `X~^T Y~` for centered, unit-Frobenius inputs. Equals
/// `1 - ||X~ - Y~R*||^2 / (||X~||^2 + ||Y~R*||^2)`; zero-padding the narrower
/// input leaves it unchanged, so unequal widths need no explicit padding.
pub fn procrustes_alignment(x: &EmbeddingMatrix, y: &EmbeddingMatrix) -> Result<f64> {
    same_rows(x, y)?;
    let mut xc = x.centered();
    let mut yc = y.centered();
    let (nx, ny) = (xc.norm(), yc.norm());
    if nx <= 0.0 || ny <= 0.0 {
        return Err(Error::ZeroNorm);
    }
    xc /= nx;
    yc /= ny;
    let cross = if xc.ncols() <= yc.ncols() { xc.transpose() * yc } else { yc.transpose() * xc };
    let nuclear: f64 = cross.singular_values().iter().sum();
    Ok(nuclear.clamp(0.0, 1.0))
}

/// Squared orthogonal Procrustes alignment, the scale used in the
/// spectral-deletion comparisons.
pub fn procrustes_similarity(x: &EmbeddingMatrix, y: &EmbeddingMatrix) -> Result<f64> {
    Ok(procrustes_alignment(x, y)?.powi(2))
}
