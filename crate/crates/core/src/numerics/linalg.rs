//! Centering, normalization, PCA, whitening and random rotations.

use nalgebra::{DMatrix, DVector};

use super::matrix::EmbeddingMatrix;
use super::rdm::ZERO_NORM;
use super::rng::{gaussian_vec, RandomStream};
use crate::error::{Error, Result};

pub fn center_columns(x: &EmbeddingMatrix) -> EmbeddingMatrix {
    EmbeddingMatrix::from_matrix_unchecked(x.centered())
}

/// Column z-score with the population (divide-by-n) standard deviation.
pub fn zscore_columns(x: &EmbeddingMatrix) -> Result<EmbeddingMatrix> {
    let n = x.nrows() as f64;
    let mut c = x.centered();
    for (j, mut col) in c.column_iter_mut().enumerate() {
        let sd = (col.norm_squared() / n).sqrt();
        if sd < ZERO_NORM {
            return Err(Error::ConstantColumn(j));
        }
        col /= sd;
    }
    Ok(EmbeddingMatrix::from_matrix_unchecked(c))
}

pub fn l2_normalize_rows(x: &EmbeddingMatrix) -> Result<EmbeddingMatrix> {
    let mut m = x.matrix().clone();
    for (i, mut row) in m.row_iter_mut().enumerate() {
        let norm = row.norm();
        if norm < ZERO_NORM {
            return Err(Error::ZeroNormRow(i));
        }
        row /= norm;
    }
    Ok(EmbeddingMatrix::from_matrix_unchecked(m))
}

/// Thin SVD with singular values sorted in descending order.
pub(crate) struct SortedSvd {
    /// Left singular vectors as columns (`n x r`).
    pub u: DMatrix<f64>,
    pub s: Vec<f64>,
    /// Right singular vectors as columns (`d x r`).
    pub v: DMatrix<f64>,
}

pub(crate) fn sorted_svd(m: &DMatrix<f64>) -> SortedSvd {
    let svd = m.clone().svd(true, true);
    let u = svd.u.expect("u requested");
    let v_t = svd.v_t.expect("v_t requested");
    let mut order: Vec<usize> = (0..svd.singular_values.len()).collect();
    order.sort_by(|&a, &b| svd.singular_values[b].total_cmp(&svd.singular_values[a]));
    let s = order.iter().map(|&i| svd.singular_values[i]).collect();
    let u = u.select_columns(&order);
    let v = v_t.transpose().select_columns(&order);
    SortedSvd { u, s, v }
}

/// Singular values (descending) of the column-centered matrix.
pub fn centered_singular_values(x: &EmbeddingMatrix) -> Vec<f64> {
    let mut s: Vec<f64> = x.centered().singular_values().iter().copied().collect();
    s.sort_by(|a, b| b.total_cmp(a));
    s
}

/// Eigen-decomposition of a symmetric matrix, eigenvalues descending.
pub(crate) fn symmetric_eigen_sorted(m: DMatrix<f64>) -> (Vec<f64>, DMatrix<f64>) {
    let eig = m.symmetric_eigen();
    let mut order: Vec<usize> = (0..eig.eigenvalues.len()).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[b].total_cmp(&eig.eigenvalues[a]));
    let vals = order.iter().map(|&i| eig.eigenvalues[i]).collect();
    (vals, eig.eigenvectors.select_columns(&order))
}

/// A fitted principal component basis.
#[derive(Debug, Clone)]
pub struct PcaFit {
    pub mean: Vec<f64>,
    /// Components as columns (`d x r`), sign-fixed.
    pub components: DMatrix<f64>,
    pub singular_values: Vec<f64>,
}

impl PcaFit {
    /// Full basis of the column-centered matrix (`r = min(n, d)`).
    pub fn fit(x: &EmbeddingMatrix) -> PcaFit {
        let c = x.centered();
        let mut svd = sorted_svd(&c);
        // largest-magnitude loading of each component is made positive
        for mut col in svd.v.column_iter_mut() {
            let pivot = col.iter().copied().fold(0.0f64, |best, v| if v.abs() > best.abs() { v } else { best });
            if pivot < 0.0 {
                col.neg_mut();
            }
        }
        PcaFit { mean: x.column_means(), components: svd.v, singular_values: svd.s }
    }

    pub fn rank(&self) -> usize {
        self.singular_values.len()
    }

    /// Projection of centered `x` onto the first `k` components.
    pub fn transform(&self, x: &EmbeddingMatrix, k: usize) -> DMatrix<f64> {
        let mut c = x.matrix().clone();
        for (j, mut col) in c.column_iter_mut().enumerate() {
            col.add_scalar_mut(-self.mean[j]);
        }
        c * self.components.columns(0, k)
    }

    /// Maps PCA coordinates (`n x r`) back to feature space, restoring the mean.
    pub fn inverse_transform(&self, scores: &DMatrix<f64>) -> DMatrix<f64> {
        let k = scores.ncols();
        let mut out = scores * self.components.columns(0, k).transpose();
        for (j, mut col) in out.column_iter_mut().enumerate() {
            col.add_scalar_mut(self.mean[j]);
        }
        out
    }
}

/// Top-`k` principal component scores and their singular values.
pub fn pca(x: &EmbeddingMatrix, k: usize) -> Result<(EmbeddingMatrix, Vec<f64>)> {
    let max = (x.nrows() - 1).min(x.ncols());
    if k == 0 || k > max {
        return Err(Error::RankTooHigh { k, max });
    }
    let fit = PcaFit::fit(x);
    let scores = fit.transform(x, k);
    Ok((EmbeddingMatrix::from_matrix_unchecked(scores), fit.singular_values[..k].to_vec()))
}

/// Shrunk ZCA whitening transform fitted on one matrix, applicable to others.
#[derive(Debug, Clone)]
pub struct Whitener {
    pub mean: Vec<f64>,
    pub transform: DMatrix<f64>,
}

impl Whitener {
    /// Σ_λ = (1-λ)Σ + λ(tr Σ/d) I with population covariance, transform Σ_λ^{-1/2}.
    pub fn fit(x: &EmbeddingMatrix, shrinkage: f64) -> Result<Whitener> {
        if !(0.0..=1.0).contains(&shrinkage) {
            return Err(Error::InvalidParameter(format!("shrinkage {shrinkage} outside [0, 1]")));
        }
        let n = x.nrows() as f64;
        let d = x.ncols();
        let c = x.centered();
        let cov = c.transpose() * &c / n;
        let iso = cov.trace() / d as f64;
        if iso <= 0.0 {
            return Err(Error::SingularCovariance);
        }
        let shrunk = cov * (1.0 - shrinkage) + DMatrix::identity(d, d) * (shrinkage * iso);
        let (vals, vecs) = symmetric_eigen_sorted(shrunk);
        let top = vals[0];
        if vals.iter().any(|&v| v <= top * 1e-12) {
            return Err(Error::SingularCovariance);
        }
        let inv_sqrt = DVector::from_iterator(d, vals.iter().map(|v| 1.0 / v.sqrt()));
        let transform = &vecs * DMatrix::from_diagonal(&inv_sqrt) * vecs.transpose();
        Ok(Whitener { mean: x.column_means(), transform })
    }

    pub fn apply(&self, x: &EmbeddingMatrix) -> Result<EmbeddingMatrix> {
        if x.ncols() != self.mean.len() {
            return Err(Error::DimMismatch(x.ncols(), self.mean.len()));
        }
        let mut c = x.matrix().clone();
        for (j, mut col) in c.column_iter_mut().enumerate() {
            col.add_scalar_mut(-self.mean[j]);
        }
        Ok(EmbeddingMatrix::from_matrix_unchecked(c * &self.transform))
    }
}

/// ZCA-whiten `x` (centered internally) with shrinkage toward isotropy.
pub fn zca_whiten(x: &EmbeddingMatrix, shrinkage: f64) -> Result<EmbeddingMatrix> {
    Whitener::fit(x, shrinkage)?.apply(x)
}

/// Haar-style random orthogonal matrix: QR of a Gaussian matrix with the
/// R diagonal forced positive.
pub fn random_orthogonal(dim: usize, stream: &RandomStream) -> DMatrix<f64> {
    if dim <= 1 {
        return DMatrix::identity(dim, dim);
    }
    let g = DMatrix::from_row_slice(dim, dim, &gaussian_vec(&mut stream.rng(0), dim * dim));
    let qr = g.qr();
    let r = qr.r();
    let mut q = qr.q();
    for (j, mut col) in q.column_iter_mut().enumerate() {
        if r[(j, j)] < 0.0 {
            col.neg_mut();
        }
    }
    q
}
