use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::numerics::rng::gaussian_vec;
use crate::numerics::{random_orthogonal, EmbeddingMatrix, PcaFit, RandomStream};

/// How the low-rank signal term of [`gen_mixed`] is normalized.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum SignalScale {
    /// `ZW / ||ZW||_F * sqrt(n d)`: unit per-entry RMS, comparable to the noise.
    #[default]
    UnitRms,
    /// `ZW / ||ZW||_F`: unit total norm, so noise dominates for any alpha < 1.
    UnitFrobenius,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MixedSpec {
    pub n: usize,
    pub d: usize,
    pub k_latent: usize,
    pub alpha: f64,
    pub seed: u64,
    #[serde(default)]
    pub signal_scale: SignalScale,
}

impl Default for MixedSpec {
    fn default() -> Self {
        Self { n: 200, d: 256, k_latent: 50, alpha: 0.5, seed: super::DEFAULT_SEED, signal_scale: SignalScale::UnitRms }
    }
}

impl MixedSpec {
    pub fn with_alpha(mut self, alpha: f64) -> Self {
        self.alpha = alpha;
        self
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = seed;
        self
    }

    pub fn with_shape(mut self, n: usize, d: usize) -> Self {
        self.n = n;
        self.d = d;
        self
    }

    fn validate(&self) -> Result<()> {
        if !(0.0..=1.0).contains(&self.alpha) {
            return Err(Error::InvalidParameter(format!("alpha {} outside [0, 1]", self.alpha)));
        }
        if self.n < 2 || self.d < 1 {
            return Err(Error::BadShape { n: self.n, d: self.d, min_rows: 2 });
        }
        let max = self.n.min(self.d);
        if self.k_latent == 0 || self.k_latent > max {
            return Err(Error::RankTooHigh { k: self.k_latent, max });
        }
        Ok(())
    }
}

/// `alpha * signal + (1 - alpha) * noise` with a rank-`k_latent` signal `ZW`.
pub fn gen_mixed(spec: &MixedSpec) -> Result<EmbeddingMatrix> {
    spec.validate()?;
    let (n, d, k) = (spec.n, spec.d, spec.k_latent);
    let stream = RandomStream::new(spec.seed);
    let z = DMatrix::from_row_slice(n, k, &gaussian_vec(&mut stream.rng(0), n * k));
    let w = DMatrix::from_row_slice(k, d, &gaussian_vec(&mut stream.rng(1), k * d));
    let eps = DMatrix::from_row_slice(n, d, &gaussian_vec(&mut stream.rng(2), n * d));
    let mut signal = z * w;
    let norm = signal.norm();
    signal /= norm;
    if spec.signal_scale == SignalScale::UnitRms {
        signal *= ((n * d) as f64).sqrt();
    }
    let out = signal * spec.alpha + eps * (1.0 - spec.alpha);
    EmbeddingMatrix::new(out)
}

/// Singular value `i` (0-based) of the power-law generator.
pub fn power_law_value(i: usize) -> f64 {
    100.0 / (i as f64 + 1.0)
}

/// `U S V^T` with Haar-random orthogonal `U`, `V` and `S_ii = 100 / (i + 1)`.
pub fn gen_power_law(n: usize, d: usize, seed: u64) -> Result<EmbeddingMatrix> {
    if n < 2 || d < 1 {
        return Err(Error::BadShape { n, d, min_rows: 2 });
    }
    let stream = RandomStream::new(seed);
    let u = random_orthogonal(n, &stream.substream(1));
    let v = random_orthogonal(d, &stream.substream(2));
    let m = n.min(d);
    let mut us = u.columns(0, m).into_owned();
    for (i, mut col) in us.column_iter_mut().enumerate() {
        col *= power_law_value(i);
    }
    EmbeddingMatrix::new(us * v.columns(0, m).transpose())
}

/// Removes the top `k_remove` principal components and maps back to the
/// original feature space with the column mean restored.
pub fn spectral_delete(x: &EmbeddingMatrix, k_remove: usize) -> Result<EmbeddingMatrix> {
    let fit = PcaFit::fit(x);
    let top = fit.singular_values.first().copied().unwrap_or(0.0);
    let rank = fit.singular_values.iter().filter(|s| **s > 1e-10 * top && **s > 0.0).count();
    if k_remove >= rank {
        return Err(Error::RankTooHigh { k: k_remove, max: rank.saturating_sub(1) });
    }
    let mut scores = fit.transform(x, fit.rank());
    scores.columns_mut(0, k_remove).fill(0.0);
    EmbeddingMatrix::new(fit.inverse_transform(&scores))
}
