use crate::error::{Error, Result};
use crate::numerics::{compute_rdm, pearson, spearman, DistanceKind, EmbeddingMatrix};

fn rdm_pair(x: &EmbeddingMatrix, y: &EmbeddingMatrix, kind: DistanceKind) -> Result<(Vec<f64>, Vec<f64>)> {
    if x.nrows() != y.nrows() {
        return Err(Error::RowCountMismatch(x.nrows(), y.nrows()));
    }
    Ok((compute_rdm(x, kind)?.into_condensed(), compute_rdm(y, kind)?.into_condensed()))
}

/// Spearman correlation of the two condensed RDMs.
pub fn rsa_spearman(x: &EmbeddingMatrix, y: &EmbeddingMatrix, kind: DistanceKind) -> Result<f64> {
    let (a, b) = rdm_pair(x, y, kind)?;
    spearman(&a, &b)
}

/// Pearson correlation of the two condensed RDMs.
pub fn rdm_pearson(x: &EmbeddingMatrix, y: &EmbeddingMatrix, kind: DistanceKind) -> Result<f64> {
    let (a, b) = rdm_pair(x, y, kind)?;
    pearson(&a, &b)
}
