//! End-to-end tests of the `gstb` binary.

use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use geostab::io::{read_matrix, write_matrix, MatrixFormat, ReportFile, REPORT_SCHEMA};
use geostab::numerics::{EmbeddingMatrix, RandomStream};
use geostab::synthetic::{gen_mixed, gen_two_class, MixedSpec, TwoClassSpec};
use rand_distr::{Distribution, StandardNormal};
use serde_json::Value;
use tempfile::TempDir;

fn gstb(dir: &Path, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_gstb"))
        .args(args)
        .current_dir(dir)
        .env_remove("GSTB_SEED")
        .output()
        .expect("run gstb")
}

fn report(out: &Output) -> ReportFile {
    assert_eq!(out.status.code(), Some(0), "stderr: {}", String::from_utf8_lossy(&out.stderr));
    let text = std::str::from_utf8(&out.stdout).unwrap();
    assert_schema_valid(text);
    ReportFile::from_json(text).unwrap()
}

fn assert_schema_valid(text: &str) {
    let schema: Value = serde_json::from_str(REPORT_SCHEMA).unwrap();
    let validator = jsonschema::validator_for(&schema).unwrap();
    let value: Value = serde_json::from_str(text).unwrap();
    let errors: Vec<String> = validator.iter_errors(&value).map(|e| e.to_string()).collect();
    assert!(errors.is_empty(), "schema violations: {errors:?}");
}

/// Exit 2 with exactly one stderr line `{"error": code, ...}`.
fn assert_error(out: &Output, code: &str) {
    assert_eq!(out.status.code(), Some(2));
    let err = String::from_utf8_lossy(&out.stderr);
    assert_eq!(err.trim_end().lines().count(), 1, "stderr: {err}");
    let v: Value = serde_json::from_str(err.trim()).unwrap();
    assert_eq!(v["error"], code, "stderr: {err}");
}

fn value(r: &ReportFile, metric: &str) -> f64 {
    r.results.iter().find(|e| e.metric == metric).unwrap_or_else(|| panic!("no {metric}")).value
}

fn gaussian(n: usize, d: usize, seed: u64) -> EmbeddingMatrix {
    let mut rng = RandomStream::new(seed).rng(0);
    let v: Vec<f64> = (0..n * d).map(|_| StandardNormal.sample(&mut rng)).collect();
    EmbeddingMatrix::from_row_major(n, d, &v).unwrap()
}

fn write(dir: &Path, name: &str, x: &EmbeddingMatrix) -> PathBuf {
    let p = dir.join(name);
    write_matrix(&p, x, MatrixFormat::from_path(&p)).unwrap();
    p
}

fn write_labels(dir: &Path, name: &str, labels: &[usize]) -> PathBuf {
    let p = dir.join(name);
    let text: String = labels.iter().map(|l| format!("{l}\n")).collect();
    std::fs::write(&p, text).unwrap();
    p
}

#[test]
fn metrics_gaussian_sanity_and_byte_identical() {
    let dir = TempDir::new().unwrap();
    write(dir.path(), "x.csv", &gaussian(500, 128, 1));
    let args = ["metrics", "--input", "x.csv", "--metric", "shesha_fs"];
    let first = gstb(dir.path(), &args);
    let r = report(&first);
    let v = value(&r, "shesha_fs");
    assert!(v.abs() <= 0.05, "shesha_fs on noise = {v}");
    assert_eq!(r.results[0].per_split.as_ref().unwrap().len(), 30);
    assert!(r.timing_seconds.is_none());
    let again = gstb(dir.path(), &args);
    assert_eq!(first.stdout, again.stdout);
    let four = gstb(dir.path(), &[&args[..], &["--workers", "4"]].concat());
    let one = gstb(dir.path(), &[&args[..], &["--workers", "1"]].concat());
    assert_eq!(first.stdout, four.stdout);
    assert_eq!(first.stdout, one.stdout);
}

#[test]
fn metrics_missing_labels_is_label_required() {
    let dir = TempDir::new().unwrap();
    write(dir.path(), "x.csv", &gaussian(40, 8, 2));
    assert_error(&gstb(dir.path(), &["metrics", "--input", "x.csv", "--metric", "variance_ratio"]), "LabelRequired");
    assert_error(&gstb(dir.path(), &["metrics", "--input", "x.csv", "--metric", "cka"]), "ReferenceRequired");
    assert_error(&gstb(dir.path(), &["metrics", "--input", "x.csv", "--metric", "nope"]), "UnknownMetric");
    assert_error(&gstb(dir.path(), &["metrics", "--input", "missing.csv"]), "Io");
    assert_error(&gstb(dir.path(), &["metrics", "--bogus-flag"]), "Usage");
}

#[test]
fn metrics_labels_reference_bootstrap() {
    let dir = TempDir::new().unwrap();
    let (x, y) = gen_two_class(&TwoClassSpec { n: 80, d: 12, separation: 3.0, ..TwoClassSpec::default() }, 0).unwrap();
    write(dir.path(), "x.gstb", &x);
    write(dir.path(), "r.csv", &gaussian(80, 6, 3));
    write_labels(dir.path(), "y.csv", y.as_slice());
    let out = gstb(
        dir.path(),
        &[
            "metrics",
            "--input",
            "x.gstb",
            "--labels",
            "y.csv",
            "--reference",
            "r.csv",
            "--metric",
            "variance_ratio,fisher,cka,procrustes",
            "--bootstrap",
            "--iterations",
            "50",
            "--timing",
        ],
    );
    let r = report(&out);
    assert_eq!(r.results.len(), 4);
    for e in &r.results {
        let ci = e.ci.as_ref().expect("ci present");
        assert!(ci.low <= ci.high && ci.iterations == 50);
    }
    // between-class variance (3/2)^2 over total 12 + 2.25
    let vr = value(&r, "variance_ratio");
    assert!((vr - 2.25 / 14.25).abs() < 0.05, "variance_ratio {vr}");
    assert!(r.timing_seconds.is_some());
}

#[test]
fn metrics_label_column_matches_labels_file() {
    let dir = TempDir::new().unwrap();
    let (x, y) = gen_two_class(&TwoClassSpec { n: 40, d: 3, ..TwoClassSpec::default() }, 0).unwrap();
    let mut text = String::from("a,b,c,cls\n");
    for i in 0..x.nrows() {
        let row: Vec<String> = x.row_vec(i).iter().map(|v| format!("{v:?}")).collect();
        text.push_str(&format!("{},{}\n", row.join(","), y.get(i)));
    }
    std::fs::write(dir.path().join("xy.csv"), text).unwrap();
    write(dir.path(), "x.csv", &x);
    write_labels(dir.path(), "y.csv", y.as_slice());
    let a = report(&gstb(
        dir.path(),
        &["metrics", "--input", "xy.csv", "--label-col", "cls", "--metric", "variance_ratio"],
    ));
    let b =
        report(&gstb(dir.path(), &["metrics", "--input", "x.csv", "--labels", "y.csv", "--metric", "variance_ratio"]));
    assert_eq!(value(&a, "variance_ratio").to_bits(), value(&b, "variance_ratio").to_bits());
}

#[test]
fn seed_from_env_and_flag() {
    let dir = TempDir::new().unwrap();
    write(dir.path(), "x.csv", &gaussian(60, 16, 4));
    let base = ["metrics", "--input", "x.csv"];
    let default = report(&gstb(dir.path(), &base));
    assert_eq!(default.seed, 320);
    let env = Command::new(env!("CARGO_BIN_EXE_gstb"))
        .args(base)
        .current_dir(dir.path())
        .env("GSTB_SEED", "7")
        .output()
        .unwrap();
    assert_eq!(report(&env).seed, 7);
    let flag = Command::new(env!("CARGO_BIN_EXE_gstb"))
        .args([&base[..], &["--seed", "9"]].concat())
        .current_dir(dir.path())
        .env("GSTB_SEED", "7")
        .output()
        .unwrap();
    assert_eq!(report(&flag).seed, 9);
}

#[test]
fn output_flag_writes_file() {
    let dir = TempDir::new().unwrap();
    write(dir.path(), "x.csv", &gaussian(60, 16, 5));
    let out = gstb(dir.path(), &["metrics", "--input", "x.csv", "--output", "rep.json"]);
    assert_eq!(out.status.code(), Some(0));
    assert!(out.stdout.is_empty());
    let text = std::fs::read_to_string(dir.path().join("rep.json")).unwrap();
    assert_schema_valid(&text);
}

#[test]
fn validate_sanity_passes_and_unknown_suite_errors() {
    let dir = TempDir::new().unwrap();
    let r = report(&gstb(dir.path(), &["validate", "--suite", "sanity"]));
    let checks: Vec<_> = r.results.iter().filter(|e| !e.metric.ends_with(".summary")).collect();
    assert_eq!(checks.len(), 4);
    assert!(checks.iter().all(|e| e.aux["passed"] == true));
    assert_eq!(value(&r, "sanity.summary"), 1.0);
    assert_error(&gstb(dir.path(), &["validate", "--suite", "nope"]), "InvalidParameter");
}

#[test]
fn drift_self_is_zero_and_row_mismatch_errors() {
    let dir = TempDir::new().unwrap();
    let spec = MixedSpec { n: 60, d: 24, k_latent: 6, ..MixedSpec::default() };
    write(dir.path(), "b.csv", &gen_mixed(&spec).unwrap());
    write(dir.path(), "short.csv", &gaussian(50, 24, 6));
    let all = "shesha,cka,procrustes,rdm_pearson,wasserstein,mmd";
    let r = report(&gstb(dir.path(), &["drift", "--baseline", "b.csv", "--current", "b.csv", "--metrics", all]));
    assert_eq!(r.results.len(), 6);
    assert!(r.results.iter().all(|e| e.value == 0.0), "{:?}", r.results);
    assert_error(&gstb(dir.path(), &["drift", "--baseline", "b.csv", "--current", "short.csv"]), "RowCountMismatch");
}

#[test]
fn drift_sweep_is_monotone_with_accuracy_analysis() {
    let dir = TempDir::new().unwrap();
    write(dir.path(), "b.csv", &gen_mixed(&MixedSpec::default()).unwrap());
    let levels = "0.01,0.02,0.05,0.1,0.15,0.2,0.25,0.3,0.4,0.5";
    let acc: Vec<f64> = vec![0.95, 0.95, 0.949, 0.948, 0.94, 0.93, 0.9, 0.88, 0.85, 0.8, 0.7];
    let text: String = acc.iter().map(|a| format!("{a}\n")).collect();
    std::fs::write(dir.path().join("acc.csv"), text).unwrap();
    let sweep = format!("noise:{levels}");
    let r = report(&gstb(
        dir.path(),
        &[
            "drift",
            "--baseline",
            "b.csv",
            "--sweep",
            &sweep,
            "--metrics",
            "shesha,cka,procrustes",
            "--accuracy",
            "acc.csv",
        ],
    ));
    for m in ["shesha", "cka", "procrustes"] {
        let col: Vec<f64> = r.results.iter().filter(|e| e.metric == format!("drift.{m}")).map(|e| e.value).collect();
        assert_eq!(col.len(), 11);
        assert_eq!(col[0], 0.0);
        assert!(col.windows(2).all(|w| w[1] >= w[0]), "{m}: {col:?}");
        let auc = value(&r, &format!("roc_auc.{m}"));
        assert!((0.0..=1.0).contains(&auc));
        let far = value(&r, &format!("false_alarm_rate.{m}"));
        assert!((0.0..=1.0).contains(&far));
    }
    assert!(r.results.iter().any(|e| e.metric == "early_warning"));
}

#[test]
fn drift_table_shesha_detects_before_cka() {
    let dir = TempDir::new().unwrap();
    // noise-table layout: level, per-metric mean drift, accuracy
    let table = "level,shesha,cka,accuracy\n\
                 0.01,0.003,0.000,0.912\n\
                 0.05,0.049,0.011,0.910\n\
                 0.1,0.119,0.037,0.905\n\
                 0.15,0.225,0.081,0.890\n\
                 0.2,0.331,0.137,0.871\n";
    std::fs::write(dir.path().join("t.csv"), table).unwrap();
    let r = report(&gstb(dir.path(), &["drift", "--table", "t.csv"]));
    let s = value(&r, "detection_threshold.shesha");
    let c = value(&r, "detection_threshold.cka");
    assert!(s < c, "shesha {s} vs cka {c}");
    let ew = r.results.iter().find(|e| e.metric == "early_warning").unwrap();
    assert_eq!(ew.aux["first"], "shesha");
}

#[test]
fn transform_identity_pca_noise_and_spec_errors() {
    let dir = TempDir::new().unwrap();
    write(dir.path(), "x.gstb", &gaussian(200, 256, 7));
    let ok = |args: &[&str]| {
        let out = gstb(dir.path(), args);
        assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    };
    ok(&["transform", "--input", "x.gstb", "--encoder", "identity", "--output", "id.gstb"]);
    let orig = std::fs::read(dir.path().join("x.gstb")).unwrap();
    assert_eq!(std::fs::read(dir.path().join("id.gstb")).unwrap(), orig);
    let sidecar = std::fs::read_to_string(dir.path().join("id.gstb.json")).unwrap();
    assert_schema_valid(&sidecar);

    ok(&["transform", "--input", "x.gstb", "--encoder", "pca:k=10", "--output", "p.csv"]);
    let p = read_matrix(&dir.path().join("p.csv")).unwrap();
    assert_eq!((p.nrows(), p.ncols()), (200, 10));

    ok(&["transform", "--input", "x.gstb", "--encoder", "noise:sigma=0.1", "--output", "n1.gstb"]);
    ok(&["transform", "--input", "x.gstb", "--encoder", "noise:sigma=0.1", "--output", "n2.gstb"]);
    let n1 = std::fs::read(dir.path().join("n1.gstb")).unwrap();
    assert_eq!(n1, std::fs::read(dir.path().join("n2.gstb")).unwrap());
    assert_ne!(n1, orig);

    assert_error(
        &gstb(dir.path(), &["transform", "--input", "x.gstb", "--encoder", "pca:k=", "--output", "e.csv"]),
        "SpecParse",
    );
    assert_error(
        &gstb(dir.path(), &["transform", "--input", "x.gstb", "--encoder", "blur", "--output", "e.csv"]),
        "SpecParse",
    );
}

fn steer_data(dir: &Path) {
    let spec = TwoClassSpec { n: 200, d: 24, separation: 2.5, ..TwoClassSpec::default() };
    for (i, name) in ["train", "test"].iter().enumerate() {
        let (x, y) = gen_two_class(&spec, i as u64).unwrap();
        write(dir, &format!("{name}_x.csv"), &x);
        write_labels(dir, &format!("{name}_y.csv"), y.as_slice());
    }
}

#[test]
fn steer_controls() {
    let dir = TempDir::new().unwrap();
    steer_data(dir.path());
    let base = ["steer", "--train", "train_x.csv,train_y.csv", "--test", "test_x.csv,test_y.csv"];
    let zero = report(&gstb(dir.path(), &[&base[..], &["--alphas", "0"]].concat()));
    assert_eq!(value(&zero, "max_drop"), 0.0);
    let r = report(&gstb(dir.path(), &[&base[..], &["--controls", "shuffled,random:20"]].concat()));
    assert!(value(&r, "true_to_random_ratio") > 2.0);
    assert!(value(&r, "shuffled_supervised_rdm").abs() <= 0.05);
    assert!(value(&r, "baseline_accuracy") > 0.8);
    let neg = report(&gstb(dir.path(), &[&base[..], &["--alphas", "-1,0,1"]].concat()));
    assert_eq!(neg.results[1].aux["alphas"], serde_json::json!([-1.0, 0.0, 1.0]));
}

#[test]
fn steer_single_class_errors() {
    let dir = TempDir::new().unwrap();
    write(dir.path(), "x.csv", &gaussian(30, 4, 8));
    write_labels(dir.path(), "y.csv", &[0; 30]);
    let out = gstb(dir.path(), &["steer", "--train", "x.csv,y.csv", "--test", "x.csv,y.csv"]);
    assert_error(&out, "SingleClass");
}
