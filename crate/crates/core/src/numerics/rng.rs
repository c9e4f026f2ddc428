//! Reproducible, order-free random streams.
//!
//! Every replicate (split, bootstrap draw, projection, ...) gets its own
//! generator seeded from `replicate_seed(base, index)`, so results never
//! depend on how work is scheduled across workers.

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

const GOLDEN: u64 = 0x9E37_79B9_7F4A_7C15;

fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(GOLDEN);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Seed for replicate `index` derived from `base_seed`.
pub fn replicate_seed(base_seed: u64, index: u64) -> u64 {
    splitmix64(base_seed ^ splitmix64(index.wrapping_mul(GOLDEN)))
}

/// A named seed from which independent per-replicate generators are derived.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct RandomStream {
    base_seed: u64,
}

impl RandomStream {
    pub fn new(base_seed: u64) -> Self {
        Self { base_seed }
    }

    pub fn base_seed(&self) -> u64 {
        self.base_seed
    }

    /// Generator for replicate `index`.
    pub fn rng(&self, index: u64) -> ChaCha8Rng {
        ChaCha8Rng::seed_from_u64(replicate_seed(self.base_seed, index))
    }

    /// A child stream, for nesting (e.g. per-level then per-split).
    pub fn substream(&self, tag: u64) -> RandomStream {
        RandomStream::new(replicate_seed(self.base_seed, tag ^ 0xA5A5_5A5A_0000_0000))
    }
}

pub(crate) fn gaussian_vec<R: Rng + ?Sized>(rng: &mut R, len: usize) -> Vec<f64> {
    (0..len).map(|_| rng.sample::<f64, _>(StandardNormal)).collect()
}

pub(crate) fn permutation<R: Rng + ?Sized>(rng: &mut R, n: usize) -> Vec<usize> {
    let mut idx: Vec<usize> = (0..n).collect();
    idx.shuffle(rng);
    idx
}

/// `k` distinct indices from `0..n`, returned sorted.
pub(crate) fn sample_without_replacement<R: Rng + ?Sized>(rng: &mut R, n: usize, k: usize) -> Vec<usize> {
    let mut idx = permutation(rng, n);
    idx.truncate(k);
    idx.sort_unstable();
    idx
}
