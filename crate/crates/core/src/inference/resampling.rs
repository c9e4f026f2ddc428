use nalgebra::{DMatrix, DVector};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::numerics::rng::permutation;
use crate::numerics::{average_ranks, EmbeddingMatrix, RandomStream};
use crate::stability::centroid_drift;
use rand::Rng;

pub const BOOTSTRAP_ITERATIONS: usize = 10_000;
pub const NULL_PERMUTATIONS: usize = 500;

const DROP_WARN_FRACTION: f64 = 0.05;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BootstrapResult {
    pub point: f64,
    pub ci_low: f64,
    pub ci_high: f64,
    pub iterations: usize,
    pub dropped: usize,
    pub warned: bool,
}

/// Linear-interpolated percentile (`q` in [0, 1]) of an ascending slice.
pub fn percentile(sorted: &[f64], q: f64) -> f64 {
    let pos = q.clamp(0.0, 1.0) * (sorted.len() - 1) as f64;
    let lo = pos.floor() as usize;
    let hi = pos.ceil() as usize;
    sorted[lo] + (pos - lo as f64) * (sorted[hi] - sorted[lo])
}

/// Percentile bootstrap over `n_rows` records. `statistic` receives the row
/// indices of one resample; non-finite or failed replicates are dropped.
pub fn bootstrap_ci<F>(
    n_rows: usize,
    statistic: F,
    iterations: usize,
    level: f64,
    stream: &RandomStream,
) -> Result<BootstrapResult>
where
    F: Fn(&[usize]) -> Result<f64> + Sync,
{
    if n_rows < 2 {
        return Err(Error::TooFewSamples { min: 2, got: n_rows });
    }
    if iterations == 0 || !(level > 0.0 && level < 1.0) {
        return Err(Error::InvalidParameter("need iterations >= 1 and level in (0, 1)".into()));
    }
    let all: Vec<usize> = (0..n_rows).collect();
    let point = statistic(&all)?;
    let reps: Vec<Option<f64>> = (0..iterations)
        .into_par_iter()
        .map(|b| {
            let mut rng = stream.rng(b as u64);
            let rows: Vec<usize> = (0..n_rows).map(|_| rng.random_range(0..n_rows)).collect();
            statistic(&rows).ok().filter(|v| v.is_finite())
        })
        .collect();
    let mut kept: Vec<f64> = reps.into_iter().flatten().collect();
    if kept.is_empty() {
        return Err(Error::AllReplicatesDegenerate);
    }
    kept.sort_by(f64::total_cmp);
    let dropped = iterations - kept.len();
    let tail = (1.0 - level) / 2.0;
    Ok(BootstrapResult {
        point,
        ci_low: percentile(&kept, tail),
        ci_high: percentile(&kept, 1.0 - tail),
        iterations,
        dropped,
        warned: dropped as f64 > DROP_WARN_FRACTION * iterations as f64,
    })
}

/// Leave-one-out values of `statistic` (entry `i` omits row `i`).
pub fn jackknife_loo<F>(n_rows: usize, statistic: F) -> Result<Vec<f64>>
where
    F: Fn(&[usize]) -> Result<f64> + Sync,
{
    if n_rows < 3 {
        return Err(Error::TooFewSamples { min: 3, got: n_rows });
    }
    (0..n_rows)
        .into_par_iter()
        .map(|i| {
            let rows: Vec<usize> = (0..n_rows).filter(|&r| r != i).collect();
            statistic(&rows)
        })
        .collect()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PermutationNull {
    pub observed: f64,
    pub null_mean: f64,
    pub null_std: f64,
    pub z: f64,
    pub permutations: usize,
}

/// Centroid drift against a null of row-order permutations. `z` is 0 when the
/// null has zero spread.
pub fn permutation_null_centroid(
    x: &EmbeddingMatrix,
    split_index: usize,
    permutations: usize,
    stream: &RandomStream,
) -> Result<PermutationNull> {
    if permutations < 2 {
        return Err(Error::InvalidParameter("need at least 2 permutations".into()));
    }
    let observed = centroid_drift(x, split_index)?;
    let null: Vec<f64> = (0..permutations)
        .into_par_iter()
        .map(|p| {
            let perm = permutation(&mut stream.rng(p as u64), x.nrows());
            centroid_drift(&x.select_rows(&perm), split_index)
        })
        .collect::<Result<_>>()?;
    let m = null.len() as f64;
    let null_mean = null.iter().sum::<f64>() / m;
    let null_std = (null.iter().map(|v| (v - null_mean).powi(2)).sum::<f64>() / m).sqrt();
    let z = if null_std > 0.0 { (observed - null_mean) / null_std } else { 0.0 };
    Ok(PermutationNull { observed, null_mean, null_std, z, permutations })
}

/// Residuals of `y` after least squares on the columns of `design`.
fn residualize(design: &DMatrix<f64>, y: &DVector<f64>) -> DVector<f64> {
    let qr = design.clone().qr();
    let q = qr.q();
    y - &q * (q.transpose() * y)
}

/// Spearman correlation of `a` and `b` after removing the linear effect of
/// the rank-transformed `controls` (with intercept).
pub fn partial_spearman(a: &[f64], b: &[f64], controls: &[Vec<f64>]) -> Result<f64> {
    let n = a.len();
    if b.len() != n {
        return Err(Error::LengthMismatch(n, b.len()));
    }
    if let Some(c) = controls.iter().find(|c| c.len() != n) {
        return Err(Error::LengthMismatch(n, c.len()));
    }
    let min = controls.len() + 3;
    if n < min {
        return Err(Error::TooShort { min, got: n });
    }
    let check = |v: &[f64]| -> Result<()> {
        match v.iter().position(|x| !x.is_finite()) {
            Some(p) => Err(Error::NonFinite { row: p, col: 0 }),
            None => Ok(()),
        }
    };
    check(a)?;
    check(b)?;
    for c in controls {
        check(c)?;
    }
    let mut design = DMatrix::from_element(n, controls.len() + 1, 1.0);
    for (j, c) in controls.iter().enumerate() {
        design.set_column(j + 1, &DVector::from_vec(average_ranks(c)));
    }
    let r = design.clone().qr().r();
    let top = (0..r.ncols()).map(|j| r[(j, j)].abs()).fold(0.0, f64::max);
    if (0..r.ncols()).any(|j| r[(j, j)].abs() <= 1e-10 * top.max(1.0)) {
        return Err(Error::CollinearControls);
    }
    let ra = residualize(&design, &DVector::from_vec(average_ranks(a)));
    let rb = residualize(&design, &DVector::from_vec(average_ranks(b)));
    let (na, nb) = (ra.norm(), rb.norm());
    // a fully explained variable has no partial association
    let scale = (n as f64).powi(3).sqrt();
    if na <= 1e-10 * scale || nb <= 1e-10 * scale {
        return Ok(0.0);
    }
    Ok((ra.dot(&rb) / (na * nb)).clamp(-1.0, 1.0))
}
