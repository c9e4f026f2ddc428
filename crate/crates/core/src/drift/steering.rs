use nalgebra::DVector;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::probe::LinearProbe;
use crate::error::{Error, Result};
use crate::numerics::linalg::sorted_svd;
use crate::numerics::rng::{gaussian_vec, permutation};
use crate::numerics::{EmbeddingMatrix, RandomStream};
use crate::stability::LabelVector;

/// The default sweep {-2, -1.5, ..., 2}.
pub fn default_alphas() -> Vec<f64> {
    (-4..=4).map(|i| i as f64 * 0.5).collect()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SteeringResult {
    pub alphas: Vec<f64>,
    pub accuracy: Vec<f64>,
    pub baseline_accuracy: f64,
    pub max_drop: f64,
}

/// Unit steering direction from a fitted probe. Binary probes use the logit
/// difference `w_1 - w_0`; with three or more classes the top right singular
/// vector of the weight matrix, signed so its largest-magnitude entry is
/// positive.
pub fn steering_direction(probe: &LinearProbe) -> Result<DVector<f64>> {
    let w = &probe.weights;
    let v: DVector<f64> = if w.nrows() == 2 {
        (w.row(1) - w.row(0)).transpose()
    } else {
        let svd = sorted_svd(w);
        if svd.s.first().is_none_or(|s| *s <= 0.0) {
            return Err(Error::ZeroWeights);
        }
        let mut v = svd.v.column(0).into_owned();
        let lead = v.iter().copied().fold(0.0f64, |a, b| if b.abs() > a.abs() { b } else { a });
        if lead < 0.0 {
            v = -v;
        }
        v
    };
    let norm = v.norm();
    if norm <= 1e-300 || !norm.is_finite() {
        return Err(Error::ZeroWeights);
    }
    Ok(v / norm)
}

/// Probe accuracy on `x_test + alpha * direction` for each alpha.
/// `max_drop` is the unsteered accuracy minus the worst steered accuracy,
/// floored at 0.
pub fn steering_sweep(
    probe: &LinearProbe,
    x_test: &EmbeddingMatrix,
    y_test: &LabelVector,
    direction: &DVector<f64>,
    alphas: &[f64],
) -> Result<SteeringResult> {
    if direction.len() != x_test.ncols() {
        return Err(Error::DimMismatch(direction.len(), x_test.ncols()));
    }
    if (direction.norm() - 1.0).abs() > 1e-9 {
        return Err(Error::InvalidParameter("steering direction must have unit norm".into()));
    }
    if alphas.is_empty() {
        return Err(Error::InvalidParameter("alpha list is empty".into()));
    }
    let m = x_test.matrix();
    let baseline_accuracy = probe.accuracy(m, y_test)?;
    let accuracy = alphas
        .par_iter()
        .map(|&a| {
            let shift = direction.transpose() * a;
            let mut shifted = m.clone();
            for mut row in shifted.row_iter_mut() {
                row += &shift;
            }
            probe.accuracy(&shifted, y_test)
        })
        .collect::<Result<Vec<_>>>()?;
    let worst = accuracy.iter().copied().fold(f64::INFINITY, f64::min);
    Ok(SteeringResult {
        alphas: alphas.to_vec(),
        accuracy,
        baseline_accuracy,
        max_drop: (baseline_accuracy - worst).max(0.0),
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RandomDirectionControl {
    pub mean_drop: f64,
    pub drops: Vec<f64>,
}

/// Sweep with `m` random unit directions; direction `i` comes from `stream.rng(i)`.
pub fn random_direction_control(
    probe: &LinearProbe,
    x_test: &EmbeddingMatrix,
    y_test: &LabelVector,
    alphas: &[f64],
    m: usize,
    stream: &RandomStream,
) -> Result<RandomDirectionControl> {
    if m == 0 {
        return Err(Error::InvalidParameter("need at least one random direction".into()));
    }
    let d = x_test.ncols();
    let drops = (0..m)
        .into_par_iter()
        .map(|i| {
            let v = DVector::from_vec(gaussian_vec(&mut stream.rng(i as u64), d));
            let v = &v / v.norm();
            steering_sweep(probe, x_test, y_test, &v, alphas).map(|r| r.max_drop)
        })
        .collect::<Result<Vec<_>>>()?;
    let mean_drop = drops.iter().sum::<f64>() / m as f64;
    Ok(RandomDirectionControl { mean_drop, drops })
}

/// A supervised metric recomputed on labels permuted by `stream.rng(0)`.
pub fn shuffled_label_control<F>(
    x: &EmbeddingMatrix,
    y: &LabelVector,
    metric_fn: F,
    stream: &RandomStream,
) -> Result<f64>
where
    F: Fn(&EmbeddingMatrix, &LabelVector) -> Result<f64>,
{
    let perm = permutation(&mut stream.rng(0), y.len());
    metric_fn(x, &y.permuted(&perm))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::drift::probe::{train_linear_probe, ProbeConfig};
    use crate::stability::{shesha_supervised_rdm, shesha_variance_ratio, SheshaConfig};

    fn blobs(n: usize, d: usize, sep: f64, seed: u64) -> (EmbeddingMatrix, LabelVector) {
        let mut v = gaussian_vec(&mut RandomStream::new(seed).rng(0), n * d);
        let labels: Vec<usize> = (0..n).map(|i| i % 2).collect();
        for i in 0..n {
            v[i * d + 1] += if labels[i] == 1 { sep } else { -sep };
        }
        v.iter_mut().for_each(|x| *x *= 0.3);
        (EmbeddingMatrix::from_row_major(n, d, &v).unwrap(), LabelVector::new(labels).unwrap())
    }

    fn probe_for(x: &EmbeddingMatrix, y: &LabelVector) -> LinearProbe {
        train_linear_probe(x, y, &ProbeConfig::default()).unwrap()
    }

    #[test]
    fn binary_direction_follows_separating_axis() {
        let (x, y) = blobs(200, 4, 4.0, 1);
        let dir = steering_direction(&probe_for(&x, &y)).unwrap();
        assert!(dir[1].abs() >= 0.99, "{dir}");
        assert!(dir[1] > 0.0);
    }

    #[test]
    fn rescaled_features_keep_direction() {
        let (x, y) = blobs(200, 4, 4.0, 1);
        let d1 = steering_direction(&probe_for(&x, &y)).unwrap();
        let scaled = EmbeddingMatrix::new(x.matrix() * 3.0).unwrap();
        // the penalty scales with the square of the feature scale
        let cfg = ProbeConfig { l2_penalty: 9.0, ..ProbeConfig::default() };
        let d2 = steering_direction(&train_linear_probe(&scaled, &y, &cfg).unwrap()).unwrap();
        assert_eq!(d1.iamax(), d2.iamax());
        assert!((d1 - d2).norm() < 1e-3);
    }

    #[test]
    fn multiclass_direction_in_mean_difference_span() {
        let n = 150;
        let mut v = gaussian_vec(&mut RandomStream::new(2).rng(0), n * 5);
        let labels: Vec<usize> = (0..n).map(|i| i % 3).collect();
        for i in 0..n {
            v.iter_mut().skip(i * 5).take(5).for_each(|x| *x *= 0.2);
            v[i * 5 + labels[i]] += 2.0;
        }
        let x = EmbeddingMatrix::from_row_major(n, 5, &v).unwrap();
        let y = LabelVector::new(labels).unwrap();
        let dir = steering_direction(&probe_for(&x, &y)).unwrap();
        // class means differ only on the first three axes
        assert!(dir[3].hypot(dir[4]) < 0.1, "{dir}");
        let lead = dir.iter().copied().fold(0.0f64, |a, b| if b.abs() > a.abs() { b } else { a });
        assert!(lead > 0.0);
    }

    #[test]
    fn zero_alpha_and_orthogonal_direction() {
        let (x, y) = blobs(100, 4, 2.0, 3);
        let p = probe_for(&x, &y);
        let dir = steering_direction(&p).unwrap();
        assert_eq!(steering_sweep(&p, &x, &y, &dir, &[0.0]).unwrap().max_drop, 0.0);
        // any unit vector orthogonal to w1 - w0 leaves every logit difference intact
        let mut o = DVector::from_vec(vec![1.0, 0.0, 0.0, 0.0]);
        o -= &dir * dir.dot(&o);
        o /= o.norm();
        let r = steering_sweep(&p, &x, &y, &o, &default_alphas()).unwrap();
        assert!(r.max_drop.abs() < 1e-12);
        assert!(r.accuracy.iter().all(|a| (a - r.baseline_accuracy).abs() < 1e-12));
    }

    #[test]
    fn true_direction_beats_random() {
        let (x, y) = blobs(200, 32, 3.0, 4);
        let (xt, yt) = blobs(200, 32, 3.0, 5);
        let p = probe_for(&x, &y);
        let dir = steering_direction(&p).unwrap();
        let alphas = default_alphas();
        let truth = steering_sweep(&p, &xt, &yt, &dir, &alphas).unwrap();
        assert_eq!(truth.alphas.len(), 9);
        let ctrl = random_direction_control(&p, &xt, &yt, &alphas, 20, &RandomStream::new(6)).unwrap();
        assert!(truth.max_drop > 2.0 * ctrl.mean_drop, "{} vs {}", truth.max_drop, ctrl.mean_drop);
    }

    #[test]
    fn shuffled_control() {
        let (x, y) = blobs(200, 8, 3.0, 7);
        let cfg = SheshaConfig::default();
        let s = RandomStream::new(8);
        let sup = |x: &EmbeddingMatrix, y: &LabelVector| shesha_supervised_rdm(x, y, &cfg);
        assert!(sup(&x, &y).unwrap() > 0.3);
        assert!(shuffled_label_control(&x, &y, sup, &s).unwrap().abs() <= 0.05);
        let vr = shesha_variance_ratio;
        assert!(shuffled_label_control(&x, &y, vr, &s).unwrap() <= vr(&x, &y).unwrap());
        let hist = shuffled_label_control(&x, &y, |_, yy| Ok(yy.class_counts()[1] as f64), &s).unwrap();
        assert_eq!(hist, y.class_counts()[1] as f64);
    }
}
