//! Deterministic linear algebra, distance and rank kernels shared by every metric.

pub mod linalg;
pub mod matrix;
pub mod rank;
pub mod rdm;
pub mod rng;

pub use linalg::{
    center_columns, l2_normalize_rows, pca, random_orthogonal, zca_whiten, zscore_columns, PcaFit, Whitener,
};
pub use matrix::EmbeddingMatrix;
pub use rank::{average_ranks, pearson, spearman};
pub use rdm::{compute_rdm, condensed_index, DistanceKind, Rdm};
pub use rng::{replicate_seed, RandomStream};
