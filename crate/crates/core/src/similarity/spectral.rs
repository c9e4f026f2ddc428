use crate::error::{Error, Result};
use crate::numerics::linalg::{centered_singular_values, sorted_svd};
use crate::numerics::EmbeddingMatrix;

const RANK_TOL: f64 = 1e-10;

fn numerical_rank(s: &[f64]) -> usize {
    let top = s.first().copied().unwrap_or(0.0);
    s.iter().filter(|v| **v > RANK_TOL * top && **v > 0.0).count()
}

/// Mean squared cosine of the principal angles between the top-`k`
/// principal-component score subspaces (left singular vectors of the centered
/// inputs), so rows must be paired. Invariant to rotating either input.
pub fn subspace_overlap(x: &EmbeddingMatrix, y: &EmbeddingMatrix, k: usize) -> Result<f64> {
    if x.nrows() != y.nrows() {
        return Err(Error::RowCountMismatch(x.nrows(), y.nrows()));
    }
    let sx = sorted_svd(&x.centered());
    let sy = sorted_svd(&y.centered());
    let max = numerical_rank(&sx.s).min(numerical_rank(&sy.s));
    if k == 0 || k > max {
        return Err(Error::RankTooHigh { k, max });
    }
    let m = sx.u.columns(0, k).transpose() * sy.u.columns(0, k);
    Ok(m.norm_squared() / k as f64)
}

fn covariance_spectrum(x: &EmbeddingMatrix) -> Result<Vec<f64>> {
    let lam: Vec<f64> = centered_singular_values(x).into_iter().map(|s| s * s / (x.nrows() - 1) as f64).collect();
    if lam.iter().sum::<f64>() <= 0.0 {
        return Err(Error::ZeroSpectrum);
    }
    Ok(lam)
}

/// Cosine between L1-normalized singular value vectors, zero-padded.
pub fn eigenspectrum_similarity(x: &EmbeddingMatrix, y: &EmbeddingMatrix) -> Result<f64> {
    let norm = |x: &EmbeddingMatrix| -> Result<Vec<f64>> {
        let s = centered_singular_values(x);
        let total: f64 = s.iter().sum();
        if total <= 0.0 {
            return Err(Error::ZeroSpectrum);
        }
        Ok(s.into_iter().map(|v| v / total).collect())
    };
    let (a, b) = (norm(x)?, norm(y)?);
    let dot: f64 = a.iter().zip(&b).map(|(p, q)| p * q).sum();
    let na = a.iter().map(|v| v * v).sum::<f64>().sqrt();
    let nb = b.iter().map(|v| v * v).sum::<f64>().sqrt();
    Ok(dot / (na * nb))
}

/// `(sum lambda)^2 / sum lambda^2` over covariance eigenvalues.
pub fn participation_ratio(x: &EmbeddingMatrix) -> Result<f64> {
    let lam = covariance_spectrum(x)?;
    let s: f64 = lam.iter().sum();
    let s2: f64 = lam.iter().map(|v| v * v).sum();
    Ok(s * s / s2)
}

/// Exponential of the entropy of the normalized covariance eigenvalues.
pub fn effective_rank(x: &EmbeddingMatrix) -> Result<f64> {
    let lam = covariance_spectrum(x)?;
    let s: f64 = lam.iter().sum();
    let h: f64 = lam.iter().map(|v| v / s).filter(|p| *p > 0.0).map(|p| -p * p.ln()).sum();
    Ok(h.exp())
}
