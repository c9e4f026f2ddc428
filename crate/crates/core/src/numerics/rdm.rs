use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use super::matrix::EmbeddingMatrix;
use crate::error::{Error, Result};

pub(crate) const ZERO_NORM: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize, Default)]
#[serde(rename_all = "lowercase")]
pub enum DistanceKind {
    #[default]
    Cosine,
    Correlation,
    Euclidean,
}

impl DistanceKind {
    pub fn as_str(&self) -> &'static str {
        match self {
            DistanceKind::Cosine => "cosine",
            DistanceKind::Correlation => "correlation",
            DistanceKind::Euclidean => "euclidean",
        }
    }
}

impl std::str::FromStr for DistanceKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "cosine" => Ok(DistanceKind::Cosine),
            "correlation" => Ok(DistanceKind::Correlation),
            "euclidean" => Ok(DistanceKind::Euclidean),
            other => Err(Error::InvalidParameter(format!("unknown distance '{other}'"))),
        }
    }
}

/// Condensed representational dissimilarity matrix.
///
/// `condensed` holds the strict upper triangle in row-major order:
/// (0,1), (0,2), ..., (0,n-1), (1,2), ...
#[derive(Debug, Clone, PartialEq)]
pub struct Rdm {
    n: usize,
    kind: DistanceKind,
    condensed: Vec<f64>,
}

impl Rdm {
    pub fn from_condensed(n: usize, kind: DistanceKind, condensed: Vec<f64>) -> Result<Self> {
        if condensed.len() != n * n.saturating_sub(1) / 2 {
            return Err(Error::BufferLength { expected: n * n.saturating_sub(1) / 2, got: condensed.len() });
        }
        if let Some(p) = condensed.iter().position(|v| !v.is_finite()) {
            return Err(Error::NonFinite { row: p, col: 0 });
        }
        Ok(Self { n, kind, condensed })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn kind(&self) -> DistanceKind {
        self.kind
    }

    pub fn condensed(&self) -> &[f64] {
        &self.condensed
    }

    pub fn into_condensed(self) -> Vec<f64> {
        self.condensed
    }

    /// Dissimilarity between samples `i` and `j` (0 on the diagonal).
    pub fn get(&self, i: usize, j: usize) -> f64 {
        match i.cmp(&j) {
            std::cmp::Ordering::Equal => 0.0,
            std::cmp::Ordering::Less => self.condensed[condensed_index(self.n, i, j)],
            std::cmp::Ordering::Greater => self.condensed[condensed_index(self.n, j, i)],
        }
    }

    pub fn to_square(&self) -> DMatrix<f64> {
        DMatrix::from_fn(self.n, self.n, |i, j| self.get(i, j))
    }
}

/// Position of pair `(i, j)`, `i < j`, in the condensed vector.
pub fn condensed_index(n: usize, i: usize, j: usize) -> usize {
    debug_assert!(i < j && j < n);
    i * n - i * (i + 1) / 2 + (j - i - 1)
}

fn condense_from_gram(g: &DMatrix<f64>) -> Vec<f64> {
    let n = g.nrows();
    let mut out = Vec::with_capacity(n * (n - 1) / 2);
    for i in 0..n {
        for j in (i + 1)..n {
            out.push((1.0 - g[(i, j)]).clamp(0.0, 2.0));
        }
    }
    out
}

fn unit_rows(mut m: DMatrix<f64>, kind: DistanceKind) -> Result<DMatrix<f64>> {
    for (i, mut row) in m.row_iter_mut().enumerate() {
        if kind == DistanceKind::Correlation {
            let first = row[0];
            if row.iter().all(|v| *v == first) {
                return Err(Error::ConstantRow(i));
            }
            let mean = row.mean();
            row.add_scalar_mut(-mean);
        }
        let norm = row.norm();
        if norm < ZERO_NORM {
            return Err(match kind {
                DistanceKind::Correlation => Error::ConstantRow(i),
                _ => Error::ZeroNormRow(i),
            });
        }
        row /= norm;
    }
    Ok(m)
}

/// Dissimilarities between every row of `a` and every row of `b` (`|a| x |b|`).
pub(crate) fn cross_dissimilarity(a: &DMatrix<f64>, b: &DMatrix<f64>, kind: DistanceKind) -> Result<DMatrix<f64>> {
    match kind {
        DistanceKind::Cosine | DistanceKind::Correlation => {
            let ua = unit_rows(a.clone(), kind)?;
            let ub = unit_rows(b.clone(), kind)?;
            let mut g = ua * ub.transpose();
            g.apply(|v| *v = (1.0 - *v).clamp(0.0, 2.0));
            Ok(g)
        }
        DistanceKind::Euclidean => Ok(DMatrix::from_fn(a.nrows(), b.nrows(), |i, j| (a.row(i) - b.row(j)).norm())),
    }
}

/// Pairwise dissimilarities between the rows of `x`.
pub fn compute_rdm(x: &EmbeddingMatrix, kind: DistanceKind) -> Result<Rdm> {
    let n = x.nrows();
    let condensed = match kind {
        DistanceKind::Cosine | DistanceKind::Correlation => {
            let u = unit_rows(x.matrix().clone(), kind)?;
            let g = &u * u.transpose();
            condense_from_gram(&g)
        }
        DistanceKind::Euclidean => {
            let rows: Vec<Vec<f64>> = (0..n).map(|i| x.row_vec(i)).collect();
            let mut out = Vec::with_capacity(n * (n - 1) / 2);
            for i in 0..n {
                for j in (i + 1)..n {
                    let s: f64 = rows[i].iter().zip(&rows[j]).map(|(a, b)| (a - b) * (a - b)).sum();
                    out.push(s.sqrt());
                }
            }
            out
        }
    };
    Ok(Rdm { n, kind, condensed })
}
