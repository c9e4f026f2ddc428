use super::split::class_centroids;
use super::LabelVector;
use crate::error::{Error, Result};
use crate::numerics::linalg::centered_singular_values;
use crate::numerics::{compute_rdm, DistanceKind, EmbeddingMatrix};

fn check_supervised(x: &EmbeddingMatrix, y: &LabelVector) -> Result<()> {
    y.check_rows(x.nrows())?;
    if y.n_classes() < 2 {
        return Err(Error::TooFewClasses { min: 2, got: y.n_classes() });
    }
    y.require_min_class_size(2)
}

/// Between-class over within-class sum of squares (trace form).
pub fn fisher_discriminant(x: &EmbeddingMatrix, y: &LabelVector) -> Result<f64> {
    check_supervised(x, y)?;
    let m = x.matrix();
    let groups = y.indices_by_class();
    let cent = class_centroids(m, &groups);
    let mean = m.row_mean();
    let between: f64 =
        groups.iter().enumerate().map(|(c, g)| g.len() as f64 * (cent.row(c) - &mean).norm_squared()).sum();
    let within: f64 = (0..m.nrows()).map(|i| (m.row(i) - cent.row(y.get(i))).norm_squared()).sum();
    if within <= 0.0 {
        if between <= 0.0 {
            return Err(Error::ZeroTotalVariance);
        }
        return Err(Error::Degenerate);
    }
    Ok(between / within)
}

/// Mean silhouette coefficient under cosine distance.
pub fn silhouette_score(x: &EmbeddingMatrix, y: &LabelVector) -> Result<f64> {
    check_supervised(x, y)?;
    let rdm = compute_rdm(x, DistanceKind::Cosine)?;
    let n = x.nrows();
    let counts = y.class_counts();
    let mut total = 0.0;
    let mut sums = vec![0.0; y.n_classes()];
    for i in 0..n {
        sums.iter_mut().for_each(|s| *s = 0.0);
        for j in 0..n {
            if j != i {
                sums[y.get(j)] += rdm.get(i, j);
            }
        }
        let own = y.get(i);
        let a = sums[own] / (counts[own] - 1) as f64;
        let b =
            (0..y.n_classes()).filter(|&c| c != own).map(|c| sums[c] / counts[c] as f64).fold(f64::INFINITY, f64::min);
        let denom = a.max(b);
        if denom > 0.0 {
            total += (b - a) / denom;
        }
    }
    Ok(total / n as f64)
}

/// Fraction of variance on the first principal component.
pub fn anisotropy(x: &EmbeddingMatrix) -> Result<f64> {
    let s = centered_singular_values(x);
    let total: f64 = s.iter().map(|v| v * v).sum();
    if total <= 0.0 {
        return Err(Error::ZeroTotalVariance);
    }
    Ok(s[0] * s[0] / total)
}
