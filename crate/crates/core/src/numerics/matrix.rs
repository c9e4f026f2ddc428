use nalgebra::DMatrix;

use crate::error::{Error, Result};

/// An `n x d` real matrix: rows are samples, columns are features.
///
/// Construction checks shape (`n >= 2`, `d >= 1`) and finiteness once, so
/// every metric downstream can assume a valid input.
#[derive(Debug, Clone, PartialEq)]
pub struct EmbeddingMatrix {
    data: DMatrix<f64>,
}

impl EmbeddingMatrix {
    pub fn new(data: DMatrix<f64>) -> Result<Self> {
        let (n, d) = data.shape();
        if n < 2 || d < 1 {
            return Err(Error::BadShape { n, d, min_rows: 2 });
        }
        for j in 0..d {
            for i in 0..n {
                if !data[(i, j)].is_finite() {
                    return Err(Error::NonFinite { row: i, col: j });
                }
            }
        }
        Ok(Self { data })
    }

    pub fn from_row_major(n: usize, d: usize, values: &[f64]) -> Result<Self> {
        if values.len() != n * d {
            return Err(Error::BufferLength { expected: n * d, got: values.len() });
        }
        Self::new(DMatrix::from_row_slice(n, d, values))
    }

    pub fn from_rows(rows: &[Vec<f64>]) -> Result<Self> {
        let n = rows.len();
        let d = rows.first().map_or(0, Vec::len);
        let mut flat = Vec::with_capacity(n * d);
        for r in rows {
            if r.len() != d {
                return Err(Error::Format(format!("ragged rows: expected {d} columns, found {}", r.len())));
            }
            flat.extend_from_slice(r);
        }
        Self::from_row_major(n, d, &flat)
    }

    /// Skips validation; callers guarantee shape and finiteness.
    pub(crate) fn from_matrix_unchecked(data: DMatrix<f64>) -> Self {
        debug_assert!(data.nrows() >= 1 && data.ncols() >= 1);
        Self { data }
    }

    pub fn nrows(&self) -> usize {
        self.data.nrows()
    }

    pub fn ncols(&self) -> usize {
        self.data.ncols()
    }

    pub fn matrix(&self) -> &DMatrix<f64> {
        &self.data
    }

    pub fn into_matrix(self) -> DMatrix<f64> {
        self.data
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.data[(i, j)]
    }

    pub fn row_vec(&self, i: usize) -> Vec<f64> {
        self.data.row(i).iter().copied().collect()
    }

    pub fn to_row_major(&self) -> Vec<f64> {
        let (n, d) = self.data.shape();
        let mut out = Vec::with_capacity(n * d);
        for i in 0..n {
            out.extend(self.data.row(i).iter().copied());
        }
        out
    }

    /// Rows in the given order; duplicates allowed (bootstrap resampling).
    pub fn select_rows(&self, idx: &[usize]) -> EmbeddingMatrix {
        Self::from_matrix_unchecked(self.data.select_rows(idx))
    }

    pub fn select_columns(&self, idx: &[usize]) -> EmbeddingMatrix {
        Self::from_matrix_unchecked(self.data.select_columns(idx))
    }

    pub fn column_means(&self) -> Vec<f64> {
        let n = self.nrows() as f64;
        self.data.column_iter().map(|c| c.sum() / n).collect()
    }

    /// Global elementwise population standard deviation.
    pub fn global_std(&self) -> f64 {
        let m = self.data.mean();
        let len = self.data.len() as f64;
        (self.data.iter().map(|v| (v - m) * (v - m)).sum::<f64>() / len).sqrt()
    }

    pub(crate) fn centered(&self) -> DMatrix<f64> {
        let means = self.column_means();
        let mut c = self.data.clone();
        for (j, mut col) in c.column_iter_mut().enumerate() {
            col.add_scalar_mut(-means[j]);
        }
        c
    }
}

impl AsRef<DMatrix<f64>> for EmbeddingMatrix {
    fn as_ref(&self) -> &DMatrix<f64> {
        &self.data
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_single_row_and_nan() {
        assert!(matches!(EmbeddingMatrix::from_row_major(1, 2, &[1.0, 2.0]), Err(Error::BadShape { .. })));
        assert_eq!(
            EmbeddingMatrix::from_row_major(2, 2, &[1.0, f64::NAN, 0.0, 1.0]),
            Err(Error::NonFinite { row: 0, col: 1 })
        );
        assert!(matches!(EmbeddingMatrix::from_row_major(2, 2, &[1.0]), Err(Error::BufferLength { .. })));
    }

    #[test]
    fn row_major_round_trip() {
        let v = [1.0, 2.0, 3.0, 4.0, 5.0, 6.0];
        let m = EmbeddingMatrix::from_row_major(3, 2, &v).unwrap();
        assert_eq!(m.get(1, 0), 3.0);
        assert_eq!(m.to_row_major(), v.to_vec());
        assert_eq!(m.row_vec(2), vec![5.0, 6.0]);
    }
}
