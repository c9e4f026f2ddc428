//! Invariant checks shared by `properties.rs` and acceptance criterion 12.
//!
//! Each entry runs a deterministic proptest runner (or a fixed scenario) and
//! returns `Err(message)` on the first violation. Invariants that are whole
//! acceptance criteria (convergence, spectral divergence, regimes, drift
//! monotonicity, steering specificity) live in `acceptance.rs`.

#![allow(dead_code)]

use geostab::drift::{
    drift_score, steering_direction, steering_sweep, train_linear_probe, DriftMetric, DriftOptions, ProbeConfig,
};
use geostab::inference::{bootstrap_ci, partial_spearman, permutation_null_centroid, roc_auc};
use geostab::io::{decode_gstb, encode_csv, encode_gstb, parse_csv, CiEntry, ReportFile, ResultEntry, REPORT_SCHEMA};
use geostab::numerics::linalg::centered_singular_values;
use geostab::numerics::{
    center_columns, compute_rdm, random_orthogonal, replicate_seed, spearman, DistanceKind, EmbeddingMatrix,
    RandomStream,
};
use geostab::similarity::{
    debiased_cka, effective_rank, linear_cka, participation_ratio, procrustes_similarity, subspace_overlap,
};
use geostab::stability::{
    perturbation_coherence, shesha_feature_split, shesha_variance_ratio, CoherenceVariant, LabelVector, SheshaConfig,
};
use geostab::synthetic::{
    apply_encoder, gen_mixed, gen_two_class, spectral_delete, EncoderKind, EncoderTransform, MixedSpec, TwoClassSpec,
};
use geostab::validate::{run_suite, with_workers, Suite};
use nalgebra::DMatrix;
use proptest::prelude::*;
use proptest::test_runner::{Config, RngAlgorithm, TestCaseError, TestRng, TestRunner};

pub type PropFn = fn() -> Result<(), String>;

/// Every invariant check, in module order.
pub const ALL: &[(&str, PropFn)] = &[
    ("rdm_type_invariants", rdm_type_invariants),
    ("rdm_cosine_row_scaling", rdm_cosine_row_scaling),
    ("rdm_euclidean_rotation", rdm_euclidean_rotation),
    ("spearman_monotone_invariance", spearman_monotone_invariance),
    ("pca_spectrum", pca_spectrum),
    ("random_stream_derivation", random_stream_derivation),
    ("purity_bit_identical", purity_bit_identical),
    ("stability_score_mean", stability_score_mean),
    ("stability_invariances", stability_invariances),
    ("noise_degradation_monotone", noise_degradation_monotone),
    ("coherence_rotation", coherence_rotation),
    ("variance_ratio_total", variance_ratio_total),
    ("cka_invariances", cka_invariances),
    ("procrustes_invariances", procrustes_invariances),
    ("subspace_overlap_rotation", subspace_overlap_rotation),
    ("effective_dimension_bounds", effective_dimension_bounds),
    ("gen_mixed_deterministic", gen_mixed_deterministic),
    ("spectral_delete_composes", spectral_delete_composes),
    ("bootstrap_worker_invariance", bootstrap_worker_invariance),
    ("permutation_z", permutation_z),
    ("roc_auc_pairs", roc_auc_pairs),
    ("partial_spearman_closed_form", partial_spearman_closed_form),
    ("drift_self_zero", drift_self_zero),
    ("probe_deterministic", probe_deterministic),
    ("steering_max_drop", steering_max_drop),
    ("gstb_round_trip", gstb_round_trip),
    ("csv_round_trip", csv_round_trip),
    ("report_schema_round_trip", report_schema_round_trip),
];

const CASES: u32 = 64;

fn runner(cases: u32) -> TestRunner {
    let cfg = Config { cases, failure_persistence: None, ..Config::default() };
    TestRunner::new_with_rng(cfg, TestRng::deterministic_rng(RngAlgorithm::ChaCha))
}

fn run<S: Strategy>(
    cases: u32,
    strategy: S,
    test: impl Fn(S::Value) -> Result<(), TestCaseError>,
) -> Result<(), String> {
    runner(cases).run(&strategy, test).map_err(|e| e.to_string())
}

fn ok_or_fail<T, E: std::fmt::Debug>(r: Result<T, E>) -> Result<T, TestCaseError> {
    r.map_err(|e| TestCaseError::fail(format!("{e:?}")))
}

fn ensure(cond: bool, msg: impl Into<String>) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg.into())
    }
}

/// Random matrix with `n` in `rows`, `d` in `cols`, entries in [-10, 10].
fn matrix(rows: std::ops::Range<usize>, cols: std::ops::Range<usize>) -> impl Strategy<Value = EmbeddingMatrix> {
    (rows, cols).prop_flat_map(|(n, d)| {
        prop::collection::vec(-10.0f64..10.0, n * d)
            .prop_map(move |v| EmbeddingMatrix::from_row_major(n, d, &v).unwrap())
    })
}

fn times(x: &EmbeddingMatrix, m: &DMatrix<f64>) -> EmbeddingMatrix {
    EmbeddingMatrix::new(x.matrix() * m).unwrap()
}

fn max_abs_diff(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max)
}

fn small_mixed(seed: u64) -> EmbeddingMatrix {
    let spec = MixedSpec { n: 60, d: 32, k_latent: 5, ..MixedSpec::default().with_seed(seed) };
    gen_mixed(&spec).unwrap()
}

pub fn rdm_type_invariants() -> Result<(), String> {
    run(CASES, matrix(2..12, 1..8), |x| {
        let n = x.nrows();
        for kind in [DistanceKind::Cosine, DistanceKind::Euclidean, DistanceKind::Correlation] {
            let Ok(r) = compute_rdm(&x, kind) else { continue };
            prop_assert_eq!(r.condensed().len(), n * (n - 1) / 2);
            prop_assert!(r.condensed().iter().all(|v| v.is_finite()));
            match kind {
                DistanceKind::Cosine => prop_assert!(r.condensed().iter().all(|v| (0.0..=2.0).contains(v))),
                DistanceKind::Euclidean => prop_assert!(r.condensed().iter().all(|v| *v >= 0.0)),
                DistanceKind::Correlation => {}
            }
            let sq = r.to_square();
            for i in 0..n {
                prop_assert_eq!(sq[(i, i)], 0.0);
                for j in 0..n {
                    prop_assert_eq!(sq[(i, j)].to_bits(), sq[(j, i)].to_bits());
                }
            }
        }
        Ok(())
    })
}

pub fn rdm_cosine_row_scaling() -> Result<(), String> {
    let strat = matrix(2..12, 2..8).prop_flat_map(|x| {
        let n = x.nrows();
        (Just(x), prop::collection::vec(0.1f64..10.0, n))
    });
    run(CASES, strat, |(x, s)| {
        let scaled = EmbeddingMatrix::new(DMatrix::from_diagonal(&s.clone().into()) * x.matrix()).unwrap();
        let (Ok(a), Ok(b)) = (compute_rdm(&x, DistanceKind::Cosine), compute_rdm(&scaled, DistanceKind::Cosine)) else {
            return Err(TestCaseError::reject("zero-norm row"));
        };
        prop_assert!(max_abs_diff(a.condensed(), b.condensed()) <= 1e-10);
        Ok(())
    })
}

pub fn rdm_euclidean_rotation() -> Result<(), String> {
    run(CASES, (matrix(2..12, 1..8), any::<u64>()), |(x, seed)| {
        let r = random_orthogonal(x.ncols(), &RandomStream::new(seed));
        let a = ok_or_fail(compute_rdm(&x, DistanceKind::Euclidean))?;
        let b = ok_or_fail(compute_rdm(&times(&x, &r), DistanceKind::Euclidean))?;
        prop_assert!(max_abs_diff(a.condensed(), b.condensed()) <= 1e-8);
        Ok(())
    })
}

pub fn spearman_monotone_invariance() -> Result<(), String> {
    let strat = (3usize..40)
        .prop_flat_map(|n| (prop::collection::vec(-1000i32..1000, n), prop::collection::vec(-1000i32..1000, n)));
    run(CASES * 2, strat, |(a, b)| {
        let a: Vec<f64> = a.into_iter().map(f64::from).collect();
        let b: Vec<f64> = b.into_iter().map(f64::from).collect();
        // exact on integers below 2^53
        let fa: Vec<f64> = a.iter().map(|v| v * v * v + 7.0).collect();
        let gb: Vec<f64> = b.iter().map(|v| 3.0 * v - 11.0).collect();
        match (spearman(&a, &b), spearman(&fa, &gb)) {
            (Ok(r1), Ok(r2)) => {
                prop_assert_eq!(r1.to_bits(), r2.to_bits());
                prop_assert!((-1.0..=1.0).contains(&r1));
            }
            (Err(_), Err(_)) => {}
            (l, r) => return Err(TestCaseError::fail(format!("{l:?} vs {r:?}"))),
        }
        Ok(())
    })
}

pub fn pca_spectrum() -> Result<(), String> {
    run(CASES, matrix(2..16, 1..10), |x| {
        let s = centered_singular_values(&x);
        prop_assert!(s.windows(2).all(|w| w[0] >= w[1]));
        let total: f64 = s.iter().map(|v| v * v).sum();
        let fro = center_columns(&x).matrix().norm_squared();
        prop_assert!((total - fro).abs() <= 1e-6, "{} vs {}", total, fro);
        Ok(())
    })
}

pub fn random_stream_derivation() -> Result<(), String> {
    use rand::RngCore;
    run(CASES, (any::<u64>(), 0u64..1000), |(seed, idx)| {
        let s = RandomStream::new(seed);
        let first: Vec<u64> = {
            let mut r = s.rng(idx);
            (0..4).map(|_| r.next_u64()).collect()
        };
        // drawing another index first must not disturb stream `idx`
        let _ = RandomStream::new(seed).rng(idx + 1).next_u64();
        let mut r = RandomStream::new(seed).rng(idx);
        let again: Vec<u64> = (0..4).map(|_| r.next_u64()).collect();
        prop_assert_eq!(first, again);
        prop_assert_eq!(replicate_seed(seed, idx), replicate_seed(seed, idx));
        Ok(())
    })
}

pub fn purity_bit_identical() -> Result<(), String> {
    let x = small_mixed(11);
    let cfg = SheshaConfig::default().with_seed(5);
    let rdm1 = compute_rdm(&x, DistanceKind::Cosine).map_err(|e| e.to_string())?;
    let rdm2 = compute_rdm(&x, DistanceKind::Cosine).map_err(|e| e.to_string())?;
    ensure(rdm1 == rdm2, "compute_rdm not repeatable")?;
    let one = with_workers(1, || shesha_feature_split(&x, &cfg)).unwrap().map_err(|e| e.to_string())?;
    let four = with_workers(4, || shesha_feature_split(&x, &cfg)).unwrap().map_err(|e| e.to_string())?;
    let bits = |v: &[f64]| v.iter().map(|f| f.to_bits()).collect::<Vec<_>>();
    ensure(one.value.to_bits() == four.value.to_bits(), "value differs across worker counts")?;
    ensure(bits(&one.per_split) == bits(&four.per_split), "per_split differs across worker counts")
}

pub fn stability_score_mean() -> Result<(), String> {
    for seed in [1, 2, 3] {
        let cfg = SheshaConfig::default().with_seed(seed).with_splits(12);
        let s = shesha_feature_split(&small_mixed(seed), &cfg).map_err(|e| e.to_string())?;
        let mean = s.per_split.iter().sum::<f64>() / s.per_split.len() as f64;
        ensure(s.per_split.len() == 12, "per_split length")?;
        ensure(s.degenerate_splits <= 12, "degenerate count")?;
        ensure((s.value - mean).abs() <= 1e-12, format!("value {} != mean {}", s.value, mean))?;
        ensure((-1.0..=1.0).contains(&s.value), "value outside [-1, 1]")?;
    }
    Ok(())
}

pub fn stability_invariances() -> Result<(), String> {
    let r = run_suite(Suite::Invariance, 320).map_err(|e| e.to_string())?;
    match r.checks.iter().find(|c| !c.passed) {
        None => Ok(()),
        Some(c) => Err(format!("{}: {} violates {}", c.name, c.observed, c.bound)),
    }
}

pub fn noise_degradation_monotone() -> Result<(), String> {
    let x = gen_mixed(&MixedSpec::default().with_seed(320)).map_err(|e| e.to_string())?;
    let cfg = SheshaConfig::default();
    let sigmas: Vec<f64> = (0..=10).map(|i| i as f64 / 10.0).collect();
    let scores = sigmas
        .iter()
        .map(|&s| {
            let xs = if s == 0.0 {
                x.clone()
            } else {
                apply_encoder(&x, &EncoderTransform::new(EncoderKind::Noise { sigma: s }, 77))?
            };
            shesha_feature_split(&xs, &cfg).map(|v| v.value)
        })
        .collect::<geostab::Result<Vec<f64>>>()
        .map_err(|e| e.to_string())?;
    let rho = spearman(&scores, &sigmas).map_err(|e| e.to_string())?;
    ensure(rho <= -0.95, format!("Spearman(score, sigma) = {rho}, scores {scores:?}"))
}

pub fn coherence_rotation() -> Result<(), String> {
    let strat = (matrix(4..10, 2..6), any::<u64>()).prop_flat_map(|(c, seed)| {
        let d = c.ncols();
        (Just(c), matrix(10..16, d..d + 1), prop::collection::vec(1.0f64..3.0, d), Just(seed))
    });
    run(CASES / 2, strat, |(control, noise, shift, seed)| {
        let mut p = noise.matrix() * 0.2;
        for mut row in p.row_iter_mut() {
            for (v, s) in row.iter_mut().zip(&shift) {
                *v += s;
            }
        }
        let perturbed = EmbeddingMatrix::new(p).unwrap();
        let r = random_orthogonal(control.ncols(), &RandomStream::new(seed));
        let a = ok_or_fail(perturbation_coherence(&control, &perturbed, CoherenceVariant::Euclidean))?;
        let b = ok_or_fail(perturbation_coherence(
            &times(&control, &r),
            &times(&perturbed, &r),
            CoherenceVariant::Euclidean,
        ))?;
        prop_assert!((a - b).abs() <= 1e-8, "{} vs {}", a, b);
        Ok(())
    })
}

pub fn variance_ratio_total() -> Result<(), String> {
    let strat = (matrix(8..24, 1..6), 2usize..5);
    run(CASES, strat, |(x, c)| {
        let y = LabelVector::new((0..x.nrows()).map(|i| i % c).collect()).unwrap();
        let ratio = ok_or_fail(shesha_variance_ratio(&x, &y))?;
        let total = center_columns(&x).matrix().norm_squared();
        let mut within = 0.0;
        for idx in y.indices_by_class() {
            within += center_columns(&x.select_rows(&idx)).matrix().norm_squared();
        }
        prop_assert!((ratio + within / total - 1.0).abs() <= 1e-10);
        Ok(())
    })
}

pub fn cka_invariances() -> Result<(), String> {
    let strat = matrix(6..14, 2..7).prop_flat_map(|x| {
        let n = x.nrows();
        (Just(x), matrix(n..n + 1, 2..7), any::<u64>(), 0.1f64..10.0)
    });
    run(CASES, strat, |(x, y, seed, s)| {
        let r = random_orthogonal(x.ncols(), &RandomStream::new(seed)) * s;
        let xr = times(&x, &r);
        for f in [linear_cka, debiased_cka] {
            let a = ok_or_fail(f(&x, &y))?;
            let b = ok_or_fail(f(&xr, &y))?;
            let c = ok_or_fail(f(&y, &xr))?;
            prop_assert!((a - b).abs() <= 1e-8 && (a - c).abs() <= 1e-8, "{} {} {}", a, b, c);
            prop_assert!(a <= 1.0 + 1e-12);
        }
        let lin = ok_or_fail(linear_cka(&x, &y))?;
        prop_assert!((0.0..=1.0 + 1e-12).contains(&lin));
        Ok(())
    })
}

pub fn procrustes_invariances() -> Result<(), String> {
    let strat = matrix(4..12, 2..6).prop_flat_map(|x| {
        let (n, d) = (x.nrows(), x.ncols());
        (Just(x), matrix(n..n + 1, d..d + 1), any::<u64>(), 0.1f64..10.0, prop::collection::vec(-5.0f64..5.0, d))
    });
    run(CASES, strat, |(x, y, seed, s, t)| {
        let base = ok_or_fail(procrustes_similarity(&x, &y))?;
        prop_assert!((0.0..=1.0).contains(&base));
        let sym = ok_or_fail(procrustes_similarity(&y, &x))?;
        prop_assert!((base - sym).abs() <= 1e-8);
        let d = x.ncols();
        let r = random_orthogonal(d, &RandomStream::new(seed));
        let mut reflect = DMatrix::identity(d, d);
        reflect[(0, 0)] = -1.0;
        let mut moved = x.matrix() * &r * &reflect * s;
        for mut row in moved.row_iter_mut() {
            for (v, c) in row.iter_mut().zip(&t) {
                *v += c;
            }
        }
        let moved = EmbeddingMatrix::new(moved).unwrap();
        let a = ok_or_fail(procrustes_similarity(&moved, &y))?;
        let b = ok_or_fail(procrustes_similarity(&y, &moved))?;
        prop_assert!((a - base).abs() <= 1e-8 && (b - base).abs() <= 1e-8, "{} {} {}", base, a, b);
        Ok(())
    })
}

pub fn subspace_overlap_rotation() -> Result<(), String> {
    run(CASES, (matrix(6..14, 3..8), any::<u64>(), 1usize..3), |(x, seed, k)| {
        let r = random_orthogonal(x.ncols(), &RandomStream::new(seed));
        let v = ok_or_fail(subspace_overlap(&x, &times(&x, &r), k))?;
        prop_assert!((v - 1.0).abs() <= 1e-8, "overlap {}", v);
        Ok(())
    })
}

pub fn effective_dimension_bounds() -> Result<(), String> {
    run(CASES, matrix(3..16, 1..10), |x| {
        let d = x.ncols() as f64;
        let er = ok_or_fail(effective_rank(&x))?;
        let pr = ok_or_fail(participation_ratio(&x))?;
        prop_assert!((1.0..=d).contains(&er), "effective rank {} for d = {}", er, d);
        prop_assert!((1.0..=d).contains(&pr), "participation ratio {} for d = {}", pr, d);
        Ok(())
    })
}

pub fn gen_mixed_deterministic() -> Result<(), String> {
    let spec = MixedSpec::default().with_seed(9).with_alpha(0.4);
    let a = with_workers(1, || gen_mixed(&spec)).unwrap().map_err(|e| e.to_string())?;
    let b = with_workers(4, || gen_mixed(&spec)).unwrap().map_err(|e| e.to_string())?;
    let bits = |m: &EmbeddingMatrix| m.to_row_major().iter().map(|v| v.to_bits()).collect::<Vec<_>>();
    ensure(bits(&a) == bits(&b), "gen_mixed differs across calls or worker counts")
}

pub fn spectral_delete_composes() -> Result<(), String> {
    let strat = matrix(8..14, 4..7).prop_flat_map(|x| (Just(x), 0usize..2, 0usize..2));
    run(CASES, strat, |(x, k, j)| {
        let once = ok_or_fail(spectral_delete(&x, k + j))?;
        let twice = ok_or_fail(spectral_delete(&ok_or_fail(spectral_delete(&x, k))?, j))?;
        let diff = max_abs_diff(&once.to_row_major(), &twice.to_row_major());
        prop_assert!(diff <= 1e-8, "max diff {}", diff);
        Ok(())
    })
}

pub fn bootstrap_worker_invariance() -> Result<(), String> {
    let x = small_mixed(4);
    let a = x.select_columns(&(0..16).collect::<Vec<_>>());
    let b = x.select_columns(&(16..32).collect::<Vec<_>>());
    let stream = RandomStream::new(17);
    let go =
        || bootstrap_ci(x.nrows(), |rows| linear_cka(&a.select_rows(rows), &b.select_rows(rows)), 300, 0.95, &stream);
    let one = with_workers(1, go).unwrap().map_err(|e| e.to_string())?;
    let four = with_workers(4, go).unwrap().map_err(|e| e.to_string())?;
    ensure(one == four, "bootstrap result differs across worker counts")?;
    ensure(one.ci_low <= one.ci_high, "ci_low > ci_high")
}

pub fn permutation_z() -> Result<(), String> {
    run(CASES / 4, (matrix(8..20, 2..5), any::<u64>()), |(x, seed)| {
        let split = x.nrows() / 2;
        let p = ok_or_fail(permutation_null_centroid(&x, split, 50, &RandomStream::new(seed)))?;
        if p.null_std > 0.0 {
            let z = (p.observed - p.null_mean) / p.null_std;
            prop_assert!((p.z - z).abs() <= 1e-12 * z.abs().max(1.0));
        }
        Ok(())
    })
}

pub fn roc_auc_pairs() -> Result<(), String> {
    let strat =
        (2usize..=50).prop_flat_map(|n| (prop::collection::vec(0i32..8, n), prop::collection::vec(any::<bool>(), n)));
    run(CASES * 2, strat, |(s, truth)| {
        let pos = truth.iter().filter(|t| **t).count();
        if pos == 0 || pos == truth.len() {
            return Err(TestCaseError::reject("single class"));
        }
        let scores: Vec<f64> = s.iter().map(|v| f64::from(*v) * 0.37).collect();
        let (mut hits, mut pairs) = (0.0, 0.0);
        for (i, ti) in truth.iter().enumerate() {
            for (j, tj) in truth.iter().enumerate() {
                if *ti && !*tj {
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
        let auc = ok_or_fail(roc_auc(&scores, &truth))?;
        prop_assert!((auc - hits / pairs).abs() <= 1e-12);
        let neg: Vec<f64> = scores.iter().map(|v| -v).collect();
        prop_assert!((ok_or_fail(roc_auc(&neg, &truth))? - (1.0 - auc)).abs() <= 1e-12);
        Ok(())
    })
}

pub fn partial_spearman_closed_form() -> Result<(), String> {
    let strat = (6usize..40).prop_flat_map(|n| {
        let v = || prop::collection::vec(-100.0f64..100.0, n);
        (v(), v(), v())
    });
    run(CASES * 2, strat, |(a, b, c)| {
        let (Ok(rab), Ok(rac), Ok(rbc)) = (spearman(&a, &b), spearman(&a, &c), spearman(&b, &c)) else {
            return Err(TestCaseError::reject("constant input"));
        };
        if 1.0 - rac * rac < 1e-6 || 1.0 - rbc * rbc < 1e-6 {
            return Err(TestCaseError::reject("control nearly collinear"));
        }
        let closed = (rab - rac * rbc) / ((1.0 - rac * rac) * (1.0 - rbc * rbc)).sqrt();
        let got = ok_or_fail(partial_spearman(&a, &b, &[c]))?;
        prop_assert!((got - closed).abs() <= 1e-8, "{} vs {}", got, closed);
        let plain = ok_or_fail(partial_spearman(&a, &b, &[]))?;
        prop_assert!((plain - rab).abs() <= 1e-9);
        Ok(())
    })
}

pub fn drift_self_zero() -> Result<(), String> {
    let opts = DriftOptions::default();
    for seed in [1, 2] {
        let b = small_mixed(seed);
        for m in DriftMetric::ALL {
            let v = drift_score(&b, &b, m, &opts).map_err(|e| e.to_string())?;
            ensure(v.abs() <= 1e-10, format!("{m} self-drift {v}"))?;
        }
    }
    Ok(())
}

fn two_class(seed: u64) -> (EmbeddingMatrix, LabelVector) {
    let spec = TwoClassSpec { n: 120, d: 16, separation: 2.0, ..TwoClassSpec::default().with_seed(seed) };
    gen_two_class(&spec, 0).unwrap()
}

pub fn probe_deterministic() -> Result<(), String> {
    let (x, y) = two_class(3);
    let cfg = ProbeConfig::default();
    let a = with_workers(1, || train_linear_probe(&x, &y, &cfg)).unwrap().map_err(|e| e.to_string())?;
    let b = with_workers(4, || train_linear_probe(&x, &y, &cfg)).unwrap().map_err(|e| e.to_string())?;
    ensure(a == b, "probe differs across runs")
}

pub fn steering_max_drop() -> Result<(), String> {
    let (x, y) = two_class(5);
    let (xt, yt) =
        gen_two_class(&TwoClassSpec { n: 120, d: 16, separation: 2.0, ..TwoClassSpec::default().with_seed(5) }, 1)
            .map_err(|e| e.to_string())?;
    let probe = train_linear_probe(&x, &y, &ProbeConfig::default()).map_err(|e| e.to_string())?;
    let dir = steering_direction(&probe).map_err(|e| e.to_string())?;
    let alphas = [-2.0, -1.0, 0.0, 1.0, 2.0];
    let r = steering_sweep(&probe, &xt, &yt, &dir, &alphas).map_err(|e| e.to_string())?;
    let min = r.accuracy.iter().copied().fold(f64::INFINITY, f64::min);
    ensure(r.max_drop >= 0.0, "max_drop negative")?;
    ensure(
        r.max_drop == r.baseline_accuracy - min,
        format!("max_drop {} != {} - {}", r.max_drop, r.baseline_accuracy, min),
    )
}

pub fn gstb_round_trip() -> Result<(), String> {
    let strat = (2usize..8, 1usize..6).prop_flat_map(|(n, d)| {
        prop::collection::vec(any::<f64>().prop_filter("finite", |v| v.is_finite()), n * d)
            .prop_map(move |v| EmbeddingMatrix::from_row_major(n, d, &v).unwrap())
    });
    run(CASES, strat, |x| {
        let bytes = encode_gstb(&x);
        prop_assert_eq!(bytes.len(), 24 + 8 * x.nrows() * x.ncols());
        let back = ok_or_fail(decode_gstb(&bytes))?;
        prop_assert_eq!(encode_gstb(&back), bytes);
        Ok(())
    })
}

pub fn csv_round_trip() -> Result<(), String> {
    let strat = (2usize..8, 1usize..6).prop_flat_map(|(n, d)| {
        prop::collection::vec(any::<f64>().prop_filter("finite", |v| v.is_finite()), n * d)
            .prop_map(move |v| EmbeddingMatrix::from_row_major(n, d, &v).unwrap())
    });
    run(CASES, strat, |x| {
        let text = encode_csv(&x);
        let table = ok_or_fail(parse_csv(&text))?;
        prop_assert!(table.header.is_none());
        let back: Vec<f64> = table.rows.concat();
        let orig = x.to_row_major();
        prop_assert_eq!(back.len(), orig.len());
        for (a, b) in orig.iter().zip(&back) {
            // 17 significant digits identify an f64 uniquely, so equality is exact
            prop_assert_eq!(a.to_bits(), b.to_bits());
        }
        Ok(())
    })
}

pub fn report_schema_round_trip() -> Result<(), String> {
    let schema: serde_json::Value = serde_json::from_str(REPORT_SCHEMA).map_err(|e| e.to_string())?;
    let validator = jsonschema::validator_for(&schema).map_err(|e| e.to_string())?;
    let finite = || any::<f64>().prop_filter("finite", |v| v.is_finite());
    let strat = (
        any::<u64>(),
        prop::collection::vec((finite(), prop::option::of((finite(), finite(), 1usize..20000))), 0..5),
        prop::option::of(prop::collection::vec(finite(), 0..6)),
        prop::sample::select(vec!["metrics", "validate", "drift", "transform", "steer"]),
    );
    run(CASES, strat, |(seed, values, per_split, command)| {
        let mut r = ReportFile::new(command, seed, serde_json::json!({ "splits": 30 }));
        for (i, (v, ci)) in values.into_iter().enumerate() {
            let mut e = ResultEntry::new(format!("m{i}"), v).with_aux(serde_json::json!({ "i": i }));
            e.ci = ci.map(|(low, high, iterations)| CiEntry { low, high, iterations });
            e.per_split = per_split.clone();
            r.results.push(e);
        }
        r.warnings.push("note".into());
        let text = ok_or_fail(r.to_json())?;
        let back = ok_or_fail(ReportFile::from_json(&text))?;
        prop_assert_eq!(&back, &r);
        let value: serde_json::Value = serde_json::from_str(&text).unwrap();
        if let Some(err) = validator.iter_errors(&value).next() {
            return Err(TestCaseError::fail(format!("schema: {err}")));
        }
        Ok(())
    })
}
