use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::numerics::rng::gaussian_vec;
use crate::numerics::{EmbeddingMatrix, RandomStream};
use crate::stability::LabelVector;

/// Two balanced Gaussian classes: means at `±separation/2` along a random unit
/// axis, noise with per-feature scale `(j + 1)^-anisotropy` normalized to
/// unit RMS and multiplied by `noise`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TwoClassSpec {
    pub n: usize,
    pub d: usize,
    pub separation: f64,
    pub noise: f64,
    pub anisotropy: f64,
    pub seed: u64,
}

impl Default for TwoClassSpec {
    fn default() -> Self {
        Self { n: 400, d: 64, separation: 1.0, noise: 1.0, anisotropy: 0.0, seed: super::DEFAULT_SEED }
    }
}

impl TwoClassSpec {
    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = seed;
        self
    }
}

/// Draws one labelled set. Rows alternate between classes; the class axis
/// depends only on the seed, so draws with different `draw` share it.
pub fn gen_two_class(spec: &TwoClassSpec, draw: u64) -> Result<(EmbeddingMatrix, LabelVector)> {
    let (n, d) = (spec.n, spec.d);
    if n < 4 || d < 2 {
        return Err(Error::BadShape { n, d, min_rows: 4 });
    }
    if !(spec.separation >= 0.0 && spec.noise > 0.0 && spec.anisotropy >= 0.0) {
        return Err(Error::InvalidParameter("need separation >= 0, noise > 0, anisotropy >= 0".into()));
    }
    let stream = RandomStream::new(spec.seed);
    let axis = gaussian_vec(&mut stream.rng(0), d);
    let norm = axis.iter().map(|v| v * v).sum::<f64>().sqrt();
    let scales: Vec<f64> = (0..d).map(|j| ((j + 1) as f64).powf(-spec.anisotropy)).collect();
    let rms = (scales.iter().map(|s| s * s).sum::<f64>() / d as f64).sqrt();
    let mut v = gaussian_vec(&mut stream.substream(1).rng(draw), n * d);
    let labels: Vec<usize> = (0..n).map(|i| i % 2).collect();
    for (i, &c) in labels.iter().enumerate() {
        let sign = if c == 1 { 0.5 } else { -0.5 };
        for j in 0..d {
            let e = &mut v[i * d + j];
            *e = *e * spec.noise * scales[j] / rms + sign * spec.separation * axis[j] / norm;
        }
    }
    Ok((EmbeddingMatrix::from_row_major(n, d, &v)?, LabelVector::new(labels)?))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn class_means_and_noise_scale() {
        let spec = TwoClassSpec { n: 4000, d: 8, separation: 3.0, noise: 0.5, ..TwoClassSpec::default() };
        let (x, y) = gen_two_class(&spec, 0).unwrap();
        let m = x.matrix();
        let groups = y.indices_by_class();
        let mean = |g: &[usize]| m.select_rows(g).row_mean();
        let gap = (mean(&groups[1]) - mean(&groups[0])).norm();
        assert!((gap - 3.0).abs() < 0.1, "{gap}");
        let resid: f64 = (0..m.nrows()).map(|i| (m.row(i) - mean(&groups[y.get(i)])).norm_squared()).sum::<f64>()
            / (m.nrows() * 8) as f64;
        assert!((resid.sqrt() - 0.5).abs() < 0.02);
        let (x2, _) = gen_two_class(&spec, 1).unwrap();
        assert_ne!(x, x2);
        assert_eq!(x, gen_two_class(&spec, 0).unwrap().0);
    }
}
