use crate::error::{Error, Result};

/// Integer class (or condition) assignments, one per row.
///
/// Classes are `0..n_classes` and every class occurs at least once.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LabelVector {
    labels: Vec<usize>,
    n_classes: usize,
}

impl LabelVector {
    pub fn new(labels: Vec<usize>) -> Result<Self> {
        if labels.is_empty() {
            return Err(Error::TooShort { min: 1, got: 0 });
        }
        let n_classes = labels.iter().max().copied().unwrap_or(0) + 1;
        let mut seen = vec![false; n_classes];
        for &l in &labels {
            seen[l] = true;
        }
        if let Some(c) = seen.iter().position(|s| !s) {
            return Err(Error::MissingClass(c));
        }
        Ok(Self { labels, n_classes })
    }

    /// Relabels arbitrary integer ids to `0..C` in order of first appearance
    /// sorted by value.
    pub fn from_raw(raw: &[i64]) -> Result<Self> {
        let mut uniq: Vec<i64> = raw.to_vec();
        uniq.sort_unstable();
        uniq.dedup();
        let labels = raw.iter().map(|v| uniq.binary_search(v).expect("value present")).collect();
        Self::new(labels)
    }

    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    pub fn n_classes(&self) -> usize {
        self.n_classes
    }

    pub fn as_slice(&self) -> &[usize] {
        &self.labels
    }

    pub fn get(&self, i: usize) -> usize {
        self.labels[i]
    }

    /// Row indices of each class, in row order.
    pub fn indices_by_class(&self) -> Vec<Vec<usize>> {
        let mut out = vec![Vec::new(); self.n_classes];
        for (i, &l) in self.labels.iter().enumerate() {
            out[l].push(i);
        }
        out
    }

    pub fn class_counts(&self) -> Vec<usize> {
        let mut out = vec![0; self.n_classes];
        for &l in &self.labels {
            out[l] += 1;
        }
        out
    }

    pub fn check_rows(&self, rows: usize) -> Result<()> {
        if self.len() != rows {
            return Err(Error::LabelLength { labels: self.len(), rows });
        }
        Ok(())
    }

    pub(crate) fn require_min_class_size(&self, min: usize) -> Result<()> {
        for (class, count) in self.class_counts().into_iter().enumerate() {
            if count < min {
                return Err(Error::ClassTooSmall { class, count, min });
            }
        }
        Ok(())
    }

    /// Labels restricted to `rows`, relabeled so all classes remain contiguous.
    pub fn select(&self, rows: &[usize]) -> Result<LabelVector> {
        let raw: Vec<i64> = rows.iter().map(|&r| self.labels[r] as i64).collect();
        Self::from_raw(&raw)
    }

    /// The same labels in a permuted row order.
    pub fn permuted(&self, perm: &[usize]) -> LabelVector {
        LabelVector { labels: perm.iter().map(|&p| self.labels[p]).collect(), n_classes: self.n_classes }
    }
}
