//! Synthetic validation suites with pinned acceptance thresholds.
//!
//! Every suite is a pure function of its seed: data come from derived
//! streams and parallel work is reduced in index order, so a report is
//! bit-identical for any worker count.

use std::fmt;
use std::str::FromStr;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use serde_json::json;

use crate::drift::{
    build_drift_series, default_alphas, random_direction_control, shuffled_label_control, steering_direction,
    steering_sweep, train_linear_probe, DriftMetric, DriftOptions, ProbeConfig,
};
use crate::error::{Error, Result};
use crate::inference::{bootstrap_ci, detection_threshold, partial_spearman, roc_auc, BOOTSTRAP_ITERATIONS};
use crate::numerics::rng::gaussian_vec;
use crate::numerics::{pearson, random_orthogonal, replicate_seed, spearman, EmbeddingMatrix, RandomStream};
use crate::similarity::{debiased_cka, procrustes_similarity, pwcka_effective_rank, PWCKA_VARIANCE};
use crate::stability::{
    shesha_feature_split, shesha_supervised_rdm, shesha_variance_ratio, shesha_zscore, LabelVector, SheshaConfig,
};
use crate::synthetic::{
    apply_encoder, gen_mixed, gen_power_law, gen_quadrants, gen_two_class, spectral_delete, validation_shesha_config,
    EncoderKind, EncoderTransform, MixedSpec, Quadrant, TwoClassSpec, STANDARD_SEEDS,
};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Suite {
    GroundTruth,
    Spectral,
    Quadrants,
    Sanity,
    Invariance,
    Convergence,
    Determinism,
    Regimes,
    Drift,
    Steering,
    Inference,
}

impl Suite {
    pub const ALL: [Suite; 11] = [
        Suite::GroundTruth,
        Suite::Spectral,
        Suite::Quadrants,
        Suite::Sanity,
        Suite::Invariance,
        Suite::Convergence,
        Suite::Determinism,
        Suite::Regimes,
        Suite::Drift,
        Suite::Steering,
        Suite::Inference,
    ];

    pub fn as_str(&self) -> &'static str {
        match self {
            Suite::GroundTruth => "ground_truth",
            Suite::Spectral => "spectral",
            Suite::Quadrants => "quadrants",
            Suite::Sanity => "sanity",
            Suite::Invariance => "invariance",
            Suite::Convergence => "convergence",
            Suite::Determinism => "determinism",
            Suite::Regimes => "regimes",
            Suite::Drift => "drift",
            Suite::Steering => "steering",
            Suite::Inference => "inference",
        }
    }
}

impl fmt::Display for Suite {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Suite {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Suite::ALL
            .into_iter()
            .find(|x| x.as_str() == s)
            .ok_or_else(|| Error::InvalidParameter(format!("unknown suite '{s}'")))
    }
}

/// Acceptance bound for one observed value.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Bound {
    AtLeast { value: f64 },
    AtMost { value: f64 },
    Above { value: f64 },
    Below { value: f64 },
    AbsAtMost { value: f64 },
    Within { target: f64, tol: f64 },
    Range { low: f64, high: f64 },
}

impl Bound {
    pub fn holds(&self, v: f64) -> bool {
        if !v.is_finite() {
            return false;
        }
        match *self {
            Bound::AtLeast { value } => v >= value,
            Bound::AtMost { value } => v <= value,
            Bound::Above { value } => v > value,
            Bound::Below { value } => v < value,
            Bound::AbsAtMost { value } => v.abs() <= value,
            Bound::Within { target, tol } => (v - target).abs() <= tol,
            Bound::Range { low, high } => v >= low && v <= high,
        }
    }
}

impl fmt::Display for Bound {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match *self {
            Bound::AtLeast { value } => write!(f, ">= {value}"),
            Bound::AtMost { value } => write!(f, "<= {value}"),
            Bound::Above { value } => write!(f, "> {value}"),
            Bound::Below { value } => write!(f, "< {value}"),
            Bound::AbsAtMost { value } => write!(f, "|v| <= {value}"),
            Bound::Within { target, tol } => write!(f, "{target} +- {tol}"),
            Bound::Range { low, high } => write!(f, "in [{low}, {high}]"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Check {
    pub name: String,
    pub observed: f64,
    pub bound: Bound,
    pub passed: bool,
}

impl Check {
    pub fn new(name: impl Into<String>, observed: f64, bound: Bound) -> Self {
        Self { name: name.into(), observed, bound, passed: bound.holds(observed) }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SuiteReport {
    pub suite: Suite,
    pub seed: u64,
    pub checks: Vec<Check>,
    /// Plot-ready rows backing the checks.
    pub table: serde_json::Value,
}

impl SuiteReport {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }
}

pub fn run_suite(suite: Suite, seed: u64) -> Result<SuiteReport> {
    let (checks, table) = match suite {
        Suite::GroundTruth => ground_truth(seed)?,
        Suite::Spectral => spectral(seed)?,
        Suite::Quadrants => quadrants(seed)?,
        Suite::Sanity => sanity(seed)?,
        Suite::Invariance => invariance(seed)?,
        Suite::Convergence => convergence(seed)?,
        Suite::Determinism => determinism(seed)?,
        Suite::Regimes => regimes(seed)?,
        Suite::Drift => drift(seed)?,
        Suite::Steering => steering(seed)?,
        Suite::Inference => inference(seed)?,
    };
    Ok(SuiteReport { suite, seed, checks, table })
}

type SuiteOutput = Result<(Vec<Check>, serde_json::Value)>;

pub const GROUND_TRUTH_LEVELS: usize = 21;

fn ground_truth(seed: u64) -> SuiteOutput {
    let cfg = validation_shesha_config(seed);
    let alphas: Vec<f64> = (0..GROUND_TRUTH_LEVELS).map(|i| i as f64 / 20.0).collect();
    let scores = alphas
        .iter()
        .enumerate()
        .map(|(i, &a)| {
            let spec = MixedSpec::default().with_alpha(a).with_seed(replicate_seed(seed, i as u64));
            Ok(shesha_feature_split(&gen_mixed(&spec)?, &cfg)?.value)
        })
        .collect::<Result<Vec<f64>>>()?;
    let rho = spearman(&scores, &alphas)?;
    let table = json!({ "alpha": alphas, "shesha": scores });
    Ok((vec![Check::new("spearman_shesha_alpha", rho, Bound::AtLeast { value: 0.98 })], table))
}

/// Table rows of the spectral deletion experiment.
pub const SPECTRAL_KS: [usize; 13] = [0, 1, 2, 3, 4, 5, 6, 7, 8, 9, 10, 15, 20];
pub const SPECTRAL_SPOTS: [(usize, f64); 5] = [(0, 0.979), (1, 0.950), (5, 0.846), (10, 0.715), (30, 0.299)];

fn spectral(seed: u64) -> SuiteOutput {
    let cfg = validation_shesha_config(seed);
    let mut ks: Vec<usize> = SPECTRAL_KS.to_vec();
    ks.push(30);
    // per power-law seed: shesha per k, then (dcka, pwcka, procrustes) at k = 1
    let per_seed = STANDARD_SEEDS
        .par_iter()
        .map(|&s| {
            let x = gen_power_law(200, 256, s)?;
            let sh = ks
                .iter()
                .map(|&k| Ok(shesha_feature_split(&spectral_delete(&x, k)?, &cfg)?.value))
                .collect::<Result<Vec<f64>>>()?;
            let y = spectral_delete(&x, 1)?;
            let sims = [
                debiased_cka(&x, &y)?,
                pwcka_effective_rank(&x, &y, PWCKA_VARIANCE)?.value,
                procrustes_similarity(&x, &y)?,
            ];
            Ok((sh, sims))
        })
        .collect::<Result<Vec<_>>>()?;
    let m = per_seed.len() as f64;
    let shesha: Vec<f64> = (0..ks.len()).map(|j| per_seed.iter().map(|p| p.0[j]).sum::<f64>() / m).collect();
    let sims: Vec<f64> = (0..3).map(|j| per_seed.iter().map(|p| p.1[j]).sum::<f64>() / m).collect();
    let at = |k: usize| shesha[ks.iter().position(|&v| v == k).expect("k in grid")];
    let mut checks = vec![
        Check::new("k1_debiased_cka", sims[0], Bound::Below { value: 0.4 }),
        Check::new("k1_pwcka", sims[1], Bound::Below { value: 0.4 }),
        Check::new("k1_procrustes", sims[2], Bound::Below { value: 0.4 }),
        Check::new("k1_shesha", at(1), Bound::Above { value: 0.9 }),
    ];
    let through_20 = SPECTRAL_KS.iter().map(|&k| at(k)).fold(f64::INFINITY, f64::min);
    checks.push(Check::new("min_shesha_k_le_20", through_20, Bound::Above { value: 0.4 }));
    for (k, target) in SPECTRAL_SPOTS {
        checks.push(Check::new(format!("shesha_k{k}"), at(k), Bound::Within { target, tol: 0.10 }));
    }
    let table = json!({
        "k": ks,
        "shesha_mean": shesha,
        "k1": { "debiased_cka": sims[0], "pwcka": sims[1], "procrustes": sims[2] },
        "seeds": STANDARD_SEEDS,
    });
    Ok((checks, table))
}

pub const QUADRANT_TARGETS: [(f64, f64); 4] = [(0.701, 0.998), (0.701, 0.001), (0.001, -0.001), (-0.001, 0.978)];

fn quadrants(seed: u64) -> SuiteOutput {
    let cfg = validation_shesha_config(seed);
    let pairs = gen_quadrants(15, seed)?;
    let scored = pairs
        .par_iter()
        .map(|p| Ok((shesha_feature_split(&p.x, &cfg)?.value, debiased_cka(&p.x, &p.y)?)))
        .collect::<Result<Vec<(f64, f64)>>>()?;
    let mut checks = vec![];
    let mut rows = vec![];
    for (q, (ts, tc)) in Quadrant::ALL.iter().zip(QUADRANT_TARGETS) {
        let vals: Vec<(f64, f64)> =
            pairs.iter().zip(&scored).filter(|(p, _)| p.quadrant == *q).map(|(_, v)| *v).collect();
        let n = vals.len() as f64;
        let ms = vals.iter().map(|v| v.0).sum::<f64>() / n;
        let mc = vals.iter().map(|v| v.1).sum::<f64>() / n;
        let name = format!("{q:?}").to_lowercase();
        checks.push(Check::new(format!("{name}_shesha_mean"), ms, Bound::Within { target: ts, tol: 0.05 }));
        checks.push(Check::new(format!("{name}_cka_mean"), mc, Bound::Within { target: tc, tol: 0.05 }));
        rows.push(json!({ "quadrant": name, "shesha": ms, "cka": mc }));
    }
    let (s, c): (Vec<f64>, Vec<f64>) = scored.into_iter().unzip();
    let rho = spearman(&s, &c)?;
    checks.push(Check::new("pooled_spearman", rho, Bound::Within { target: 0.204, tol: 0.15 }));
    Ok((checks, json!({ "quadrants": rows, "shesha": s, "cka": c })))
}

fn gaussian_matrix(n: usize, d: usize, stream: &RandomStream, index: u64) -> Result<EmbeddingMatrix> {
    EmbeddingMatrix::from_row_major(n, d, &gaussian_vec(&mut stream.rng(index), n * d))
}

fn sanity(seed: u64) -> SuiteOutput {
    let stream = RandomStream::new(seed).substream(0x5a);
    let cfg = SheshaConfig::default().with_seed(seed);
    let x = gaussian_matrix(500, 128, &stream, 0)?;
    let mut rng = stream.rng(1);
    let labels: Vec<usize> =
        (0..500).map(|i| if i < 10 { i } else { rand::Rng::random_range(&mut rng, 0..10) }).collect();
    let y = LabelVector::new(labels)?;
    let fs = shesha_feature_split(&x, &cfg)?.value;
    let vr = shesha_variance_ratio(&x, &y)?;
    let zs = shesha_zscore(&x, &y, &cfg)?;
    let sup = shesha_supervised_rdm(&x, &y, &cfg)?;
    let checks = vec![
        Check::new("feature_split", fs, Bound::AbsAtMost { value: 0.05 }),
        Check::new("variance_ratio", vr, Bound::AtMost { value: 0.05 }),
        Check::new("zscore", zs, Bound::AtMost { value: 0.05 }),
        Check::new("supervised_rdm", sup, Bound::AbsAtMost { value: 0.05 }),
    ];
    Ok((checks, json!({ "n": 500, "d": 128, "classes": 10 })))
}

pub const TRANSLATION_SHIFT: f64 = 1.0;
pub const SCALE_FACTOR: f64 = 2.5;

fn invariance(seed: u64) -> SuiteOutput {
    let x = gen_mixed(&MixedSpec::default().with_seed(seed))?;
    let r = random_orthogonal(x.ncols(), &RandomStream::new(seed).substream(0x1a));
    let rotated = EmbeddingMatrix::new(x.matrix() * r)?;
    let scaled = EmbeddingMatrix::new(x.matrix() * SCALE_FACTOR)?;
    let translated = EmbeddingMatrix::new(x.matrix().add_scalar(TRANSLATION_SHIFT))?;
    let mut checks = vec![];
    let mut rows = vec![];
    for (label, cfg) in
        [("validation", validation_shesha_config(seed)), ("cosine", SheshaConfig::default().with_seed(seed))]
    {
        let s = |m: &EmbeddingMatrix| shesha_feature_split(m, &cfg).map(|v| v.value);
        let base = s(&x)?;
        let dr = (s(&rotated)? - base).abs();
        let ds = (s(&scaled)? - base).abs();
        let dt = (s(&translated)? - base).abs();
        checks.push(Check::new(format!("{label}_rotation_delta"), dr, Bound::AtMost { value: 0.01 }));
        checks.push(Check::new(format!("{label}_scaling_delta"), ds, Bound::AtMost { value: 0.01 }));
        // cosine distance is not translation invariant; reported, not checked
        if label == "validation" {
            checks.push(Check::new(format!("{label}_translation_delta"), dt, Bound::AtMost { value: 0.01 }));
        }
        rows.push(json!({ "config": label, "base": base, "rotation": dr, "scaling": ds, "translation": dt }));
    }
    Ok((checks, json!({ "shift": TRANSLATION_SHIFT, "scale": SCALE_FACTOR, "rows": rows })))
}

fn convergence(seed: u64) -> SuiteOutput {
    let cfg = SheshaConfig::default().with_seed(seed);
    let mut checks = vec![];
    let mut rows = vec![];
    for (i, a) in [0.3, 0.6, 0.9].into_iter().enumerate() {
        let draw = |n: usize| {
            let spec = MixedSpec { n, ..MixedSpec::default().with_alpha(a).with_seed(replicate_seed(seed, i as u64)) };
            shesha_feature_split(&gen_mixed(&spec)?, &cfg).map(|v| v.value)
        };
        let (small, large) = (draw(400)?, draw(1600)?);
        checks.push(Check::new(format!("alpha{a}_abs_diff"), (small - large).abs(), Bound::Below { value: 0.05 }));
        rows.push(json!({ "alpha": a, "n400": small, "n1600": large }));
    }
    Ok((checks, json!(rows)))
}

/// Runs `f` on a dedicated pool of `workers` threads.
pub fn with_workers<T: Send>(workers: usize, f: impl FnOnce() -> T + Send) -> Result<T> {
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(workers.max(1))
        .build()
        .map_err(|e| Error::InvalidParameter(format!("cannot build worker pool: {e}")))?;
    Ok(pool.install(f))
}

fn determinism(seed: u64) -> SuiteOutput {
    let x = gen_mixed(&MixedSpec::default().with_seed(seed))?;
    let cfg = SheshaConfig::default().with_seed(seed);
    let a = x.select_columns(&(0..128).collect::<Vec<_>>());
    let b = x.select_columns(&(128..256).collect::<Vec<_>>());
    let work = || -> Result<Vec<u64>> {
        let fs = shesha_feature_split(&x, &cfg)?;
        let boot = bootstrap_ci(
            x.nrows(),
            |rows| debiased_cka(&a.select_rows(rows), &b.select_rows(rows)),
            200,
            0.95,
            &RandomStream::new(seed),
        )?;
        let mut bits: Vec<u64> = fs.per_split.iter().map(|v| v.to_bits()).collect();
        bits.extend([fs.value, boot.ci_low, boot.ci_high].map(f64::to_bits));
        Ok(bits)
    };
    let first = with_workers(1, work)??;
    let repeat = with_workers(1, work)??;
    let four = with_workers(4, work)??;
    let mismatch = |o: &[u64]| first.iter().zip(o).filter(|(p, q)| p != q).count() as f64;
    let checks = vec![
        Check::new("rerun_mismatched_values", mismatch(&repeat), Bound::AtMost { value: 0.0 }),
        Check::new("workers_1_vs_4_mismatched_values", mismatch(&four), Bound::AtMost { value: 0.0 }),
    ];
    Ok((checks, json!({ "values_compared": first.len() })))
}

pub const REGIME_PCA_KS: [usize; 6] = [2, 5, 10, 20, 50, 100];
pub const REGIME_RP_KS: [usize; 6] = [8, 16, 32, 64, 128, 200];

fn regimes(seed: u64) -> SuiteOutput {
    let cfg = SheshaConfig::default().with_seed(seed);
    let bases = [0.3, 0.5, 0.7, 0.9]
        .iter()
        .enumerate()
        .map(|(i, &a)| gen_mixed(&MixedSpec::default().with_alpha(a).with_seed(replicate_seed(seed, i as u64))))
        .collect::<Result<Vec<_>>>()?;
    let grid = |pca: bool| -> Result<(Vec<f64>, Vec<f64>)> {
        let ks = if pca { REGIME_PCA_KS } else { REGIME_RP_KS };
        let jobs: Vec<(usize, usize)> = (0..bases.len()).flat_map(|b| ks.iter().map(move |&k| (b, k))).collect();
        let vals = jobs
            .par_iter()
            .map(|&(b, k)| {
                let kind = if pca { EncoderKind::Pca { k } } else { EncoderKind::RandomProjection { k } };
                let y = apply_encoder(&bases[b], &EncoderTransform::new(kind, replicate_seed(seed, 100 + b as u64)))?;
                Ok((shesha_feature_split(&y, &cfg)?.value, debiased_cka(&bases[b], &y)?))
            })
            .collect::<Result<Vec<(f64, f64)>>>()?;
        Ok(vals.into_iter().unzip())
    };
    let (ps, pc) = grid(true)?;
    let (rs, rc) = grid(false)?;
    let checks = vec![
        Check::new("pca_spearman_shesha_cka", spearman(&ps, &pc)?, Bound::Below { value: 0.0 }),
        Check::new("random_projection_spearman_shesha_cka", spearman(&rs, &rc)?, Bound::Above { value: 0.5 }),
    ];
    let table = json!({
        "pca": { "k": REGIME_PCA_KS, "shesha": ps, "cka": pc },
        "random_projection": { "k": REGIME_RP_KS, "shesha": rs, "cka": rc },
    });
    Ok((checks, table))
}

pub const DRIFT_LEVELS: [f64; 10] = [0.01, 0.02, 0.05, 0.1, 0.15, 0.2, 0.25, 0.3, 0.4, 0.5];
pub const DRIFT_SEEDS: usize = 5;

fn drift(seed: u64) -> SuiteOutput {
    let metrics = [DriftMetric::Shesha, DriftMetric::Cka, DriftMetric::Procrustes, DriftMetric::RdmPearson];
    let series = (0..DRIFT_SEEDS as u64)
        .into_par_iter()
        .map(|i| {
            let s = replicate_seed(seed, i);
            let x = gen_mixed(&MixedSpec::default().with_seed(s))?;
            let opts = DriftOptions { seed: s, ..DriftOptions::default() };
            build_drift_series(&x, &DRIFT_LEVELS, &metrics, &opts, None)
        })
        .collect::<Result<Vec<_>>>()?;
    let mut checks = vec![];
    let mut means = serde_json::Map::new();
    for m in metrics {
        let mut worst = f64::INFINITY;
        for s in &series {
            worst = worst.min(spearman(&DRIFT_LEVELS, s.drift(m)?)?);
        }
        checks.push(Check::new(format!("{m}_min_rank_corr_with_sigma"), worst, Bound::AtLeast { value: 0.95 }));
        let mean: Vec<f64> = (0..DRIFT_LEVELS.len())
            .map(|j| {
                series.iter().map(|s| s.drift(m).map(|d| d[j])).sum::<Result<f64>>().map(|v| v / DRIFT_SEEDS as f64)
            })
            .collect::<Result<_>>()?;
        means.insert(m.to_string(), json!(mean));
    }
    let mean_of = |m: DriftMetric| -> Vec<f64> {
        means[m.as_str()].as_array().expect("array").iter().map(|v| v.as_f64().expect("number")).collect()
    };
    let (sh, ck) = (mean_of(DriftMetric::Shesha), mean_of(DriftMetric::Cka));
    let margin = DRIFT_LEVELS
        .iter()
        .enumerate()
        .filter(|(_, l)| **l >= 0.15)
        .map(|(j, _)| sh[j] - ck[j])
        .fold(f64::INFINITY, f64::min);
    checks.push(Check::new("min_shesha_minus_cka_sigma_ge_0.15", margin, Bound::Above { value: 0.0 }));
    let thresholds: Vec<_> = series
        .iter()
        .map(|s| {
            json!({ "shesha": detection_threshold(s, DriftMetric::Shesha, 0.05).ok().flatten(),
                         "cka": detection_threshold(s, DriftMetric::Cka, 0.05).ok().flatten() })
        })
        .collect();
    Ok((checks, json!({ "sigma": DRIFT_LEVELS, "mean_drift": means, "detection_thresholds": thresholds })))
}

pub const STEERING_SEPARATIONS: [f64; 5] = [0.5, 1.0, 1.5, 2.0, 3.0];
pub const STEERING_NOISES: [f64; 3] = [0.5, 1.0, 1.5];
pub const STEERING_ANISOTROPIES: [f64; 2] = [0.0, 0.5];
pub const RANDOM_DIRECTIONS: usize = 20;

/// The separable two-class grid standing in for a model zoo.
pub fn steering_grid(seed: u64) -> Vec<TwoClassSpec> {
    let mut out = vec![];
    for &separation in &STEERING_SEPARATIONS {
        for &noise in &STEERING_NOISES {
            for &anisotropy in &STEERING_ANISOTROPIES {
                let i = out.len() as u64;
                out.push(TwoClassSpec {
                    separation,
                    noise,
                    anisotropy,
                    seed: replicate_seed(seed, i),
                    ..TwoClassSpec::default()
                });
            }
        }
    }
    out
}

fn steering(seed: u64) -> SuiteOutput {
    let grid = steering_grid(seed);
    let cfg = SheshaConfig::default().with_seed(seed);
    let alphas = default_alphas();
    let rows = grid
        .par_iter()
        .enumerate()
        .map(|(i, spec)| {
            let (x, y) = gen_two_class(spec, 0)?;
            let (xt, yt) = gen_two_class(spec, 1)?;
            let probe = train_linear_probe(&x, &y, &ProbeConfig::default())?;
            let dir = steering_direction(&probe)?;
            let sweep = steering_sweep(&probe, &xt, &yt, &dir, &alphas)?;
            let stream = RandomStream::new(replicate_seed(seed, 1000 + i as u64));
            let random = random_direction_control(&probe, &xt, &yt, &alphas, RANDOM_DIRECTIONS, &stream.substream(1))?;
            let stability = shesha_supervised_rdm(&x, &y, &cfg)?;
            let shuffled =
                shuffled_label_control(&x, &y, |a, b| shesha_supervised_rdm(a, b, &cfg), &stream.substream(2))?;
            Ok([stability, sweep.max_drop, random.mean_drop, shuffled, sweep.baseline_accuracy])
        })
        .collect::<Result<Vec<[f64; 5]>>>()?;
    let col = |j: usize| rows.iter().map(|r| r[j]).collect::<Vec<f64>>();
    let rho = spearman(&col(0), &col(1))?;
    let worst_shuffled = col(3).iter().copied().fold(0.0f64, |a, b| a.max(b.abs()));
    let ratio = col(1).iter().sum::<f64>() / col(2).iter().sum::<f64>();
    let checks = vec![
        Check::new("spearman_stability_max_drop", rho, Bound::AtLeast { value: 0.8 }),
        Check::new("max_abs_shuffled_supervised_shesha", worst_shuffled, Bound::AtMost { value: 0.05 }),
        Check::new("true_over_random_drop_ratio", ratio, Bound::Above { value: 2.0 }),
    ];
    let table = json!({
        "separation": grid.iter().map(|g| g.separation).collect::<Vec<_>>(),
        "noise": grid.iter().map(|g| g.noise).collect::<Vec<_>>(),
        "anisotropy": grid.iter().map(|g| g.anisotropy).collect::<Vec<_>>(),
        "supervised_shesha": col(0),
        "max_drop": col(1),
        "random_mean_drop": col(2),
        "shuffled_supervised_shesha": col(3),
        "baseline_accuracy": col(4),
    });
    Ok((checks, table))
}

pub const COVERAGE_TRIALS: usize = 200;

fn bivariate(n: usize, rho: f64, rng: &mut rand_chacha::ChaCha8Rng) -> (Vec<f64>, Vec<f64>) {
    let a = gaussian_vec(rng, n);
    let e = gaussian_vec(rng, n);
    let b = a.iter().zip(&e).map(|(x, z)| rho * x + (1.0 - rho * rho).sqrt() * z).collect();
    (a, b)
}

fn inference(seed: u64) -> SuiteOutput {
    let stream = RandomStream::new(seed).substream(0xb0);
    // each trial's data and replicates come from its own index-derived stream
    let covered = (0..COVERAGE_TRIALS)
        .into_par_iter()
        .map(|t| {
            let (a, b) = bivariate(200, 0.5, &mut stream.rng(t as u64));
            let stat = |rows: &[usize]| {
                let x: Vec<f64> = rows.iter().map(|&r| a[r]).collect();
                let y: Vec<f64> = rows.iter().map(|&r| b[r]).collect();
                pearson(&x, &y)
            };
            let r = bootstrap_ci(200, stat, BOOTSTRAP_ITERATIONS, 0.95, &stream.substream(1 + t as u64))?;
            Ok(r.ci_low <= 0.5 && 0.5 <= r.ci_high)
        })
        .collect::<Result<Vec<bool>>>()?;
    let coverage = covered.iter().filter(|c| **c).count() as f64 / COVERAGE_TRIALS as f64;

    // rank-statistic AUC against pair counting on small tied instances
    let mut worst_auc: f64 = 0.0;
    for t in 0..50u64 {
        let mut rng = stream.substream(2).rng(t);
        let n = 5 + (t as usize % 46);
        let scores: Vec<f64> = (0..n).map(|_| rand::Rng::random_range(&mut rng, 0..6) as f64).collect();
        let mut truth: Vec<bool> = (0..n).map(|_| rand::Rng::random_bool(&mut rng, 0.5)).collect();
        truth[0] = true;
        truth[1] = false;
        let (mut hits, mut pairs) = (0.0, 0.0);
        for i in 0..n {
            for j in 0..n {
                if truth[i] && !truth[j] {
                    pairs += 1.0;
                    hits += if scores[i] > scores[j] {
                        1.0
                    } else if scores[i] == scores[j] {
                        0.5
                    } else {
                        0.0
                    };
                }
            }
        }
        worst_auc = worst_auc.max((roc_auc(&scores, &truth)? - hits / pairs).abs());
    }

    let (a, b) = bivariate(100, 0.4, &mut stream.substream(3).rng(0));
    let partial_gap = (partial_spearman(&a, &b, &[])? - spearman(&a, &b)?).abs();
    let checks = vec![
        Check::new("bootstrap_coverage_rho_0.5", coverage, Bound::Range { low: 0.90, high: 0.98 }),
        Check::new("roc_auc_vs_pair_count_max_abs_diff", worst_auc, Bound::AtMost { value: 1e-12 }),
        Check::new("partial_spearman_empty_controls_abs_diff", partial_gap, Bound::AtMost { value: 1e-9 }),
    ];
    Ok((checks, json!({ "trials": COVERAGE_TRIALS, "iterations": BOOTSTRAP_ITERATIONS, "n": 200 })))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn bounds() {
        assert!(Bound::Within { target: 0.7, tol: 0.05 }.holds(0.749));
        assert!(!Bound::Within { target: 0.7, tol: 0.05 }.holds(0.76));
        assert!(!Bound::AtLeast { value: 0.0 }.holds(f64::NAN));
        assert!(Bound::Range { low: 0.9, high: 0.98 }.holds(0.95));
        assert_eq!("ground_truth".parse::<Suite>().unwrap(), Suite::GroundTruth);
        assert!("nope".parse::<Suite>().is_err());
    }

    #[test]
    fn steering_grid_shape() {
        let g = steering_grid(320);
        assert_eq!(g.len(), 30);
        assert_eq!(g, steering_grid(320));
    }
}
