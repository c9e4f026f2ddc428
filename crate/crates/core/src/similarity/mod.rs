//! Cross-representation similarity and spectral-geometry metrics.

mod distribution;
mod kernel;
mod rsa;
mod spectral;

use serde::{Deserialize, Serialize};

pub use distribution::{median_heuristic, mmd_rbf, sliced_wasserstein, SLICED_PROJECTIONS};
pub use kernel::{
    debiased_cka, linear_cka, procrustes_alignment, procrustes_similarity, pwcka_effective_rank, PWCKA_VARIANCE,
};
pub use rsa::{rdm_pearson, rsa_spearman};
pub use spectral::{effective_rank, eigenspectrum_similarity, participation_ratio, subspace_overlap};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SimilarityValue {
    pub metric: String,
    pub value: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub aux: Option<usize>,
}
