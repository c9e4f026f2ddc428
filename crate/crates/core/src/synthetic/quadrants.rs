use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use super::{gen_mixed, MixedSpec};
use crate::error::{Error, Result};
use crate::numerics::rng::gaussian_vec;
use crate::numerics::{replicate_seed, DistanceKind, EmbeddingMatrix, RandomStream};
use crate::similarity::debiased_cka;
use crate::stability::{shesha_feature_split, SheshaConfig};

pub const QUADRANT_MAX_ATTEMPTS: usize = 100;
const Q4_SHESHA_MAX: f64 = 0.4;
const Q4_CKA_MIN: f64 = 0.4;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Quadrant {
    /// High stability, high similarity.
    Q1,
    /// High stability, low similarity.
    Q2,
    /// Low stability, low similarity.
    Q3,
    /// Low stability, high similarity.
    Q4,
}

impl Quadrant {
    pub const ALL: [Quadrant; 4] = [Quadrant::Q1, Quadrant::Q2, Quadrant::Q3, Quadrant::Q4];
}

#[derive(Debug, Clone, PartialEq)]
pub struct QuadrantPair {
    pub quadrant: Quadrant,
    pub x: EmbeddingMatrix,
    pub y: EmbeddingMatrix,
    pub accepted: bool,
    pub attempts: usize,
}

/// Stability configuration of the ground-truth suites: correlation distance, 50 splits.
pub fn validation_shesha_config(seed: u64) -> SheshaConfig {
    SheshaConfig::default().with_distance(DistanceKind::Correlation).with_splits(50).with_seed(seed)
}

fn add_noise(x: &EmbeddingMatrix, sigma: f64, seed: u64) -> Result<EmbeddingMatrix> {
    let eps = gaussian_vec(&mut RandomStream::new(seed).rng(0), x.nrows() * x.ncols());
    EmbeddingMatrix::new(x.matrix() + DMatrix::from_row_slice(x.nrows(), x.ncols(), &eps) * sigma)
}

fn gaussian(n: usize, d: usize, seed: u64) -> Result<EmbeddingMatrix> {
    EmbeddingMatrix::from_row_major(n, d, &gaussian_vec(&mut RandomStream::new(seed).rng(0), n * d))
}

fn make_pair(q: Quadrant, seed: u64) -> Result<QuadrantPair> {
    let mixed = |alpha: f64, s: u64| gen_mixed(&MixedSpec::default().with_alpha(alpha).with_seed(s));
    let s = |i: u64| replicate_seed(seed, i);
    let (x, y, attempts) = match q {
        Quadrant::Q1 => {
            let x = mixed(0.9, s(0))?;
            let y = add_noise(&x, 0.1, s(1))?;
            (x, y, 1)
        }
        Quadrant::Q2 => (mixed(0.9, s(0))?, mixed(0.9, s(1))?, 1),
        Quadrant::Q3 => (mixed(0.1, s(0))?, mixed(0.1, s(1))?, 1),
        Quadrant::Q4 => {
            let cfg_seed = s(2);
            let mut found = None;
            for attempt in 0..QUADRANT_MAX_ATTEMPTS {
                let a = s(100 + attempt as u64);
                let x = gaussian(200, 256, a)?;
                let y = add_noise(&x, 0.15, replicate_seed(a, 1))?;
                let stab = shesha_feature_split(&x, &validation_shesha_config(cfg_seed))?.value;
                if stab < Q4_SHESHA_MAX && debiased_cka(&x, &y)? > Q4_CKA_MIN {
                    found = Some((x, y, attempt + 1));
                    break;
                }
            }
            found.ok_or(Error::RejectionExhausted(QUADRANT_MAX_ATTEMPTS))?
        }
    };
    Ok(QuadrantPair { quadrant: q, x, y, accepted: true, attempts })
}

/// `pairs_per_quadrant` representation pairs from each of the four
/// (stability, similarity) quadrants, in quadrant-major order.
pub fn gen_quadrants(pairs_per_quadrant: usize, seed: u64) -> Result<Vec<QuadrantPair>> {
    let mut out = Vec::with_capacity(4 * pairs_per_quadrant);
    for (qi, q) in Quadrant::ALL.iter().enumerate() {
        for p in 0..pairs_per_quadrant {
            out.push(make_pair(*q, replicate_seed(seed, (qi * 1000 + p) as u64))?);
        }
    }
    Ok(out)
}
