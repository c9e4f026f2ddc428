use nalgebra::DVector;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::numerics::rng::gaussian_vec;
use crate::numerics::{EmbeddingMatrix, RandomStream};

pub const SLICED_PROJECTIONS: usize = 100;

/// Value at fraction `t` of a sorted sample, linear between order statistics.
fn quantile(sorted: &[f64], t: f64) -> f64 {
    let pos = t * (sorted.len() - 1) as f64;
    let lo = pos.floor() as usize;
    let hi = pos.ceil() as usize;
    sorted[lo] + (pos - lo as f64) * (sorted[hi] - sorted[lo])
}

/// 1-D 2-Wasserstein distance between two empirical samples.
pub(crate) fn wasserstein_1d(a: &mut [f64], b: &mut [f64]) -> f64 {
    a.sort_by(f64::total_cmp);
    b.sort_by(f64::total_cmp);
    let sq: f64 = if a.len() == b.len() {
        a.iter().zip(b.iter()).map(|(p, q)| (p - q) * (p - q)).sum::<f64>() / a.len() as f64
    } else {
        let m = a.len().max(b.len());
        (0..m)
            .map(|i| {
                let t = if m == 1 { 0.0 } else { i as f64 / (m - 1) as f64 };
                (quantile(a, t) - quantile(b, t)).powi(2)
            })
            .sum::<f64>()
            / m as f64
    };
    sq.sqrt()
}

/// Unit projection direction `p` of the sliced estimate.
pub(crate) fn projection_direction(d: usize, stream: &RandomStream, p: usize) -> DVector<f64> {
    loop {
        let v = DVector::from_vec(gaussian_vec(&mut stream.rng(p as u64), d));
        let n = v.norm();
        if n > 0.0 {
            return v / n;
        }
    }
}

/// Mean 1-D 2-Wasserstein distance over random unit projections.
pub fn sliced_wasserstein(
    x: &EmbeddingMatrix,
    y: &EmbeddingMatrix,
    projections: usize,
    stream: &RandomStream,
) -> Result<f64> {
    if x.ncols() != y.ncols() {
        return Err(Error::DimMismatch(x.ncols(), y.ncols()));
    }
    if projections == 0 {
        return Err(Error::InvalidParameter("projections must be >= 1".into()));
    }
    let per: Vec<f64> = (0..projections)
        .into_par_iter()
        .map(|p| {
            let u = projection_direction(x.ncols(), stream, p);
            let mut a: Vec<f64> = (x.matrix() * &u).iter().copied().collect();
            let mut b: Vec<f64> = (y.matrix() * &u).iter().copied().collect();
            wasserstein_1d(&mut a, &mut b)
        })
        .collect();
    Ok(per.iter().sum::<f64>() / projections as f64)
}

fn sq_dist(a: &EmbeddingMatrix, i: usize, b: &EmbeddingMatrix, j: usize) -> f64 {
    (a.matrix().row(i) - b.matrix().row(j)).norm_squared()
}

/// Median Euclidean distance over distinct pairs of the pooled sample.
pub fn median_heuristic(x: &EmbeddingMatrix, y: &EmbeddingMatrix) -> f64 {
    let pooled: Vec<(&EmbeddingMatrix, usize)> =
        (0..x.nrows()).map(|i| (x, i)).chain((0..y.nrows()).map(|i| (y, i))).collect();
    let mut d = Vec::with_capacity(pooled.len() * (pooled.len() - 1) / 2);
    for p in 0..pooled.len() {
        for q in (p + 1)..pooled.len() {
            d.push(sq_dist(pooled[p].0, pooled[p].1, pooled[q].0, pooled[q].1).sqrt());
        }
    }
    d.sort_by(f64::total_cmp);
    let m = d.len();
    if m % 2 == 1 {
        d[m / 2]
    } else {
        0.5 * (d[m / 2 - 1] + d[m / 2])
    }
}

/// Unbiased MMD^2 with an RBF kernel `exp(-|a-b|^2 / (2 h^2))`.
///
/// With equal sample sizes the cross term also skips `i == j`, so identical
/// inputs give exactly 0.
pub fn mmd_rbf(x: &EmbeddingMatrix, y: &EmbeddingMatrix, bandwidth: Option<f64>) -> Result<f64> {
    if x.ncols() != y.ncols() {
        return Err(Error::DimMismatch(x.ncols(), y.ncols()));
    }
    let h = match bandwidth {
        Some(h) if h > 0.0 && h.is_finite() => h,
        Some(_) => return Err(Error::InvalidParameter("bandwidth must be positive".into())),
        None => median_heuristic(x, y),
    };
    if h <= 0.0 {
        return Err(Error::DegenerateBandwidth);
    }
    let gamma = 1.0 / (2.0 * h * h);
    let k = |a: &EmbeddingMatrix, i: usize, b: &EmbeddingMatrix, j: usize| (-gamma * sq_dist(a, i, b, j)).exp();
    let (m, n) = (x.nrows(), y.nrows());
    let within = |a: &EmbeddingMatrix| {
        let mut s = 0.0;
        for i in 0..a.nrows() {
            for j in (i + 1)..a.nrows() {
                s += k(a, i, a, j);
            }
        }
        2.0 * s / (a.nrows() * (a.nrows() - 1)) as f64
    };
    let paired = m == n;
    let mut cross = 0.0;
    for i in 0..m {
        for j in 0..n {
            if !(paired && i == j) {
                cross += k(x, i, y, j);
            }
        }
    }
    let cross = if paired { cross / (m * (m - 1)) as f64 } else { cross / (m * n) as f64 };
    Ok(within(x) + within(y) - 2.0 * cross)
}
