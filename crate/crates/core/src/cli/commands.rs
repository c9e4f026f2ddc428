use std::path::{Path, PathBuf};

use serde_json::{json, Value};

use super::{DriftArgs, MetricsArgs, Outcome, SteerArgs, TransformArgs, ValidateArgs};
use crate::drift::{
    build_drift_series, default_alphas, drift_score, random_direction_control, shuffled_label_control,
    steering_direction, steering_sweep, train_linear_probe, DriftMetric, DriftOptions, DriftSeries, ProbeConfig,
};
use crate::error::{Error, Result};
use crate::inference::{
    bootstrap_ci, detection_threshold, early_warning_compare, false_alarm_rate, roc_auc, sensitivity_at_fpr,
    EarlyWarning,
};
use crate::io::{
    parse_csv, read_labels, read_matrix, read_matrix_with_label_column, read_vector, write_matrix, CiEntry,
    MatrixFormat, ReportFile, ResultEntry, RunConfig,
};
use crate::numerics::{EmbeddingMatrix, RandomStream};
use crate::similarity::{
    debiased_cka, effective_rank, eigenspectrum_similarity, linear_cka, mmd_rbf, participation_ratio,
    procrustes_similarity, pwcka_effective_rank, rdm_pearson, rsa_spearman, sliced_wasserstein, PWCKA_VARIANCE,
    SLICED_PROJECTIONS,
};
use crate::stability::{
    anisotropy, fisher_discriminant, shesha_class_separation, shesha_feature_split, shesha_label_conditioned,
    shesha_lda_subspace, shesha_sample_split, shesha_supervised_rdm, shesha_trial_split, shesha_variance_ratio,
    shesha_zscore, silhouette_score, LabelVector, DEFAULT_ANCHORS,
};
use crate::synthetic::{apply_encoder, EncoderKind, EncoderTransform};
use crate::validate::{run_suite, Suite};

/// Subsample count and fraction for the resampled supervised metrics.
const SUBSAMPLE_ITERS: usize = 50;
const SUBSAMPLE_FRAC: f64 = 0.5;
const CI_LEVEL: f64 = 0.95;

const BOOTSTRAP_TAG: u64 = 0xb007;
const WASSERSTEIN_TAG: u64 = 0x5e5e;
const RANDOM_CONTROL_TAG: u64 = 0x0a11;
const SHUFFLE_CONTROL_TAG: u64 = 0x5f1e;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Needs {
    Nothing,
    Labels,
    Reference,
}

/// Metric names accepted by `gstb metrics`.
pub const METRIC_NAMES: [&str; 23] = [
    "shesha_fs",
    "shesha_ss",
    "anisotropy",
    "participation_ratio",
    "effective_rank",
    "shesha_lc",
    "supervised_rdm",
    "zscore",
    "variance_ratio",
    "class_separation",
    "lda_subspace",
    "fisher",
    "silhouette",
    "trial_split",
    "cka",
    "debiased_cka",
    "pwcka",
    "procrustes",
    "rsa",
    "rdm_pearson",
    "wasserstein",
    "mmd",
    "eigenspectrum",
];

fn needs(name: &str) -> Result<Needs> {
    let idx = METRIC_NAMES.iter().position(|m| *m == name).ok_or_else(|| Error::UnknownMetric(name.to_string()))?;
    Ok(match idx {
        0..=4 => Needs::Nothing,
        5..=13 => Needs::Labels,
        _ => Needs::Reference,
    })
}

struct Inputs<'a> {
    x: &'a EmbeddingMatrix,
    y: Option<&'a LabelVector>,
    r: Option<&'a EmbeddingMatrix>,
}

struct MetricValue {
    value: f64,
    per_split: Option<Vec<f64>>,
    aux: Value,
}

impl MetricValue {
    fn plain(value: f64) -> Self {
        Self { value, per_split: None, aux: Value::Null }
    }
}

fn eval_metric(name: &str, inp: &Inputs<'_>, cfg: &RunConfig) -> Result<MetricValue> {
    let need = needs(name)?;
    let label = || inp.y.ok_or_else(|| Error::LabelRequired(name.to_string()));
    let reference = || inp.r.ok_or_else(|| Error::ReferenceRequired(name.to_string()));
    if need == Needs::Labels {
        label()?;
    }
    if need == Needs::Reference {
        reference()?;
    }
    let x = inp.x;
    let sc = cfg.shesha();
    let stream = RandomStream::new(cfg.seed);
    let split = |s: crate::stability::StabilityScore| MetricValue {
        value: s.value,
        aux: json!({ "degenerate_splits": s.degenerate_splits }),
        per_split: Some(s.per_split),
    };
    Ok(match name {
        "shesha_fs" => split(shesha_feature_split(x, &sc)?),
        "shesha_ss" => split(shesha_sample_split(x, &sc, DEFAULT_ANCHORS)?),
        "anisotropy" => MetricValue::plain(anisotropy(x)?),
        "participation_ratio" => MetricValue::plain(participation_ratio(x)?),
        "effective_rank" => MetricValue::plain(effective_rank(x)?),
        "shesha_lc" => split(shesha_label_conditioned(x, label()?, &sc)?),
        "supervised_rdm" => MetricValue::plain(shesha_supervised_rdm(x, label()?, &sc)?),
        "zscore" => MetricValue::plain(shesha_zscore(x, label()?, &sc)?),
        "variance_ratio" => MetricValue::plain(shesha_variance_ratio(x, label()?)?),
        "class_separation" => {
            MetricValue::plain(shesha_class_separation(x, label()?, SUBSAMPLE_ITERS, SUBSAMPLE_FRAC, &stream)?)
        }
        "lda_subspace" => {
            MetricValue::plain(shesha_lda_subspace(x, label()?, SUBSAMPLE_ITERS, SUBSAMPLE_FRAC, &stream)?)
        }
        "fisher" => MetricValue::plain(fisher_discriminant(x, label()?)?),
        "silhouette" => MetricValue::plain(silhouette_score(x, label()?)?),
        "trial_split" => MetricValue::plain(shesha_trial_split(x, label()?)?),
        "cka" => MetricValue::plain(linear_cka(x, reference()?)?),
        "debiased_cka" => MetricValue::plain(debiased_cka(x, reference()?)?),
        "pwcka" => {
            let v = pwcka_effective_rank(x, reference()?, PWCKA_VARIANCE)?;
            MetricValue { value: v.value, per_split: None, aux: json!({ "components": v.aux }) }
        }
        "procrustes" => MetricValue::plain(procrustes_similarity(x, reference()?)?),
        "rsa" => MetricValue::plain(rsa_spearman(x, reference()?, cfg.distance)?),
        "rdm_pearson" => MetricValue::plain(rdm_pearson(x, reference()?, cfg.distance)?),
        "wasserstein" => MetricValue::plain(sliced_wasserstein(
            x,
            reference()?,
            SLICED_PROJECTIONS,
            &stream.substream(WASSERSTEIN_TAG),
        )?),
        "mmd" => MetricValue::plain(mmd_rbf(x, reference()?, None)?),
        "eigenspectrum" => MetricValue::plain(eigenspectrum_similarity(x, reference()?)?),
        other => return Err(Error::UnknownMetric(other.to_string())),
    })
}

fn path_str(p: &Path) -> String {
    p.display().to_string()
}

fn merge(mut base: Value, extra: Value) -> Value {
    if let (Some(b), Value::Object(e)) = (base.as_object_mut(), extra) {
        b.extend(e);
    }
    base
}

pub(crate) fn metrics(a: &MetricsArgs, cfg: &RunConfig) -> Result<Outcome> {
    for m in &a.metric {
        needs(m)?;
    }
    let (x, y) = match &a.label_col {
        Some(col) => {
            let (x, y) = read_matrix_with_label_column(&a.input, col)?;
            (x, Some(y))
        }
        None => (read_matrix(&a.input)?, a.labels.as_deref().map(read_labels).transpose()?),
    };
    if let Some(y) = &y {
        y.check_rows(x.nrows())?;
    }
    let r = a.reference.as_deref().map(read_matrix).transpose()?;
    let params = merge(
        cfg.echo(),
        json!({
            "input": path_str(&a.input),
            "labels": a.labels.as_deref().map(path_str),
            "label_col": a.label_col,
            "reference": a.reference.as_deref().map(path_str),
            "metrics": a.metric,
            "bootstrap": a.bootstrap,
        }),
    );
    let mut report = ReportFile::new("metrics", cfg.seed, params);
    let inputs = Inputs { x: &x, y: y.as_ref(), r: r.as_ref() };
    for name in &a.metric {
        let v = eval_metric(name, &inputs, cfg)?;
        let mut entry = ResultEntry::new(name.clone(), v.value).with_aux(v.aux);
        entry.per_split = v.per_split;
        if a.bootstrap {
            let stat = |rows: &[usize]| -> Result<f64> {
                let xs = x.select_rows(rows);
                let ys = y.as_ref().map(|l| l.select(rows)).transpose()?;
                let rs = r.as_ref().map(|m| m.select_rows(rows));
                let sub = Inputs { x: &xs, y: ys.as_ref(), r: rs.as_ref() };
                Ok(eval_metric(name, &sub, cfg)?.value)
            };
            let stream = RandomStream::new(cfg.seed).substream(BOOTSTRAP_TAG);
            let boot = bootstrap_ci(x.nrows(), stat, cfg.bootstrap_iterations, CI_LEVEL, &stream)?;
            if boot.warned {
                report.warnings.push(format!(
                    "{name}: {} of {} bootstrap replicates were degenerate and dropped",
                    boot.dropped, boot.iterations
                ));
            }
            entry.ci = Some(CiEntry { low: boot.ci_low, high: boot.ci_high, iterations: boot.iterations });
        }
        report.results.push(entry);
    }
    Ok(Outcome { report: Some(report), checks_failed: false })
}

pub(crate) fn validate(a: &ValidateArgs, cfg: &RunConfig) -> Result<Outcome> {
    let suites: Vec<Suite> = match a.suite.as_str() {
        "all" => Suite::ALL.to_vec(),
        s => vec![s.parse()?],
    };
    let params = json!({ "suite": a.suite });
    let mut report = ReportFile::new("validate", cfg.seed, params);
    let mut failed = false;
    for suite in suites {
        let out = run_suite(suite, cfg.seed)?;
        let total = out.checks.len();
        let mut passed = 0usize;
        for c in &out.checks {
            if c.passed {
                passed += 1;
            } else {
                failed = true;
                report.warnings.push(format!("{suite}.{}: observed {} violates {}", c.name, c.observed, c.bound));
            }
            report.results.push(
                ResultEntry::new(format!("{suite}.{}", c.name), c.observed)
                    .with_aux(json!({ "bound": c.bound, "bound_text": c.bound.to_string(), "passed": c.passed })),
            );
        }
        report.results.push(
            ResultEntry::new(format!("{suite}.summary"), passed as f64 / total.max(1) as f64).with_aux(json!({
                "checks_passed": passed,
                "checks_total": total,
                "table": out.table,
            })),
        );
    }
    Ok(Outcome { report: Some(report), checks_failed: failed })
}

fn parse_drift_metrics(names: &[String]) -> Result<Vec<DriftMetric>> {
    let mut out: Vec<DriftMetric> = Vec::new();
    for n in names {
        let m: DriftMetric = n.trim().parse()?;
        if !out.contains(&m) {
            out.push(m);
        }
    }
    if out.is_empty() {
        return Err(Error::InvalidParameter("no drift metrics requested".into()));
    }
    Ok(out)
}

fn parse_sweep(spec: &str) -> Result<Vec<f64>> {
    let list = spec
        .strip_prefix("noise:")
        .ok_or_else(|| Error::SpecParse(format!("{spec}: sweep must look like noise:0.01,0.05")))?;
    let mut levels = list
        .split(',')
        .map(|s| s.trim().parse::<f64>().map_err(|_| Error::SpecParse(format!("{spec}: '{s}' is not a number"))))
        .collect::<Result<Vec<f64>>>()?;
    if levels.first() != Some(&0.0) {
        levels.insert(0, 0.0);
    }
    Ok(levels)
}

/// Reads a precomputed series: a `level` column, one column per drift metric
/// name and an optional `accuracy` column.
fn read_series_table(path: &Path, metrics: &[DriftMetric]) -> Result<DriftSeries> {
    let text = std::fs::read_to_string(path).map_err(|e| Error::Io(format!("{}: {e}", path.display())))?;
    let table = parse_csv(&text)?;
    let header = table.header.ok_or_else(|| Error::Format("series table needs a header row".into()))?;
    let column = |name: &str| -> Option<Vec<f64>> {
        header.iter().position(|h| h == name).map(|c| table.rows.iter().map(|r| r[c]).collect())
    };
    let levels = column("level").ok_or_else(|| Error::Format("series table has no 'level' column".into()))?;
    let mut series = DriftSeries::new(levels)?;
    for &m in metrics {
        let values =
            column(m.as_str()).ok_or_else(|| Error::Format(format!("series table has no '{}' column", m.as_str())))?;
        series = series.with_metric(m, values)?;
    }
    if let Some(acc) = column("accuracy") {
        series = series.with_accuracy(acc)?;
    }
    Ok(series)
}

fn early_warning_entry(series: &DriftSeries, a: DriftMetric, b: DriftMetric, threshold: f64) -> Result<ResultEntry> {
    let ew = early_warning_compare(series, a, series, b, threshold)?;
    let (value, first) = match ew {
        EarlyWarning::First(m) if m == a => (1.0, m.as_str()),
        EarlyWarning::First(m) => (-1.0, m.as_str()),
        EarlyWarning::Tie => (0.0, "tie"),
    };
    Ok(ResultEntry::new("early_warning", value).with_aux(json!({
        "a": a.as_str(),
        "b": b.as_str(),
        "first": first,
        "level_a": detection_threshold(series, a, threshold)?,
        "level_b": detection_threshold(series, b, threshold)?,
    })))
}

fn series_report(series: &DriftSeries, metrics: &[DriftMetric], a: &DriftArgs, report: &mut ReportFile) -> Result<()> {
    for &m in metrics {
        for (level, v) in series.levels().iter().zip(series.drift(m)?) {
            report
                .results
                .push(ResultEntry::new(format!("drift.{}", m.as_str()), *v).with_aux(json!({ "level": level })));
        }
    }
    if let Some(acc) = series.accuracy() {
        for (level, v) in series.levels().iter().zip(acc) {
            report.results.push(ResultEntry::new("accuracy", *v).with_aux(json!({ "level": level })));
        }
    }
    for &m in metrics {
        match detection_threshold(series, m, a.threshold)? {
            Some(level) => report.results.push(
                ResultEntry::new(format!("detection_threshold.{}", m.as_str()), level)
                    .with_aux(json!({ "threshold": a.threshold })),
            ),
            None => report.warnings.push(format!("{}: drift never reaches {} in this series", m.as_str(), a.threshold)),
        }
    }
    if metrics.len() >= 2 {
        report.results.push(early_warning_entry(series, metrics[0], metrics[1], a.threshold)?);
    }
    let Some(acc) = series.accuracy() else {
        return Ok(());
    };
    let skip = usize::from(series.levels()[0] == 0.0);
    let truth: Vec<bool> = acc[skip..].iter().map(|v| acc[0] - v >= a.stable_drop).collect();
    for &m in metrics {
        let scores = &series.drift(m)?[skip..];
        let name = m.as_str();
        match roc_auc(scores, &truth) {
            Ok(auc) => {
                report.results.push(ResultEntry::new(format!("roc_auc.{name}"), auc));
                let sens = sensitivity_at_fpr(scores, &truth, a.fpr)?;
                report
                    .results
                    .push(ResultEntry::new(format!("sensitivity.{name}"), sens).with_aux(json!({ "fpr": a.fpr })));
            }
            Err(Error::SingleClass) => {
                report.warnings.push(format!("{name}: ROC undefined, every level has the same harm label"))
            }
            Err(e) => return Err(e),
        }
        match false_alarm_rate(series, m, a.threshold, a.stable_drop) {
            Ok(v) => report.results.push(
                ResultEntry::new(format!("false_alarm_rate.{name}"), v)
                    .with_aux(json!({ "threshold": a.threshold, "stable_drop": a.stable_drop })),
            ),
            Err(Error::NoStablePoints) => report.warnings.push(format!("{name}: no functionally stable levels")),
            Err(e) => return Err(e),
        }
    }
    Ok(())
}

pub(crate) fn drift(a: &DriftArgs, cfg: &RunConfig) -> Result<Outcome> {
    let metrics = parse_drift_metrics(&a.metrics)?;
    let opts = DriftOptions { distance: cfg.distance, seed: cfg.seed, ..DriftOptions::default() };
    let params = merge(
        cfg.echo(),
        json!({
            "baseline": a.baseline.as_deref().map(path_str),
            "current": a.current.as_deref().map(path_str),
            "sweep": a.sweep,
            "table": a.table.as_deref().map(path_str),
            "accuracy": a.accuracy.as_deref().map(path_str),
            "metrics": metrics.iter().map(|m| m.as_str()).collect::<Vec<_>>(),
            "threshold": a.threshold,
            "stable_drop": a.stable_drop,
            "fpr": a.fpr,
            "projections": opts.projections,
        }),
    );
    let mut report = ReportFile::new("drift", cfg.seed, params);
    if let Some(table) = &a.table {
        let series = read_series_table(table, &metrics)?;
        series_report(&series, &metrics, a, &mut report)?;
        return Ok(Outcome { report: Some(report), checks_failed: false });
    }
    let baseline_path =
        a.baseline.as_deref().ok_or_else(|| Error::InvalidParameter("--baseline is required".into()))?;
    let baseline = read_matrix(baseline_path)?;
    match (&a.current, &a.sweep) {
        (Some(current), None) => {
            let current = read_matrix(current)?;
            for &m in &metrics {
                let v = drift_score(&baseline, &current, m, &opts)?;
                report.results.push(ResultEntry::new(format!("drift.{}", m.as_str()), v));
            }
        }
        (None, Some(sweep)) => {
            let levels = parse_sweep(sweep)?;
            let mut series = build_drift_series(&baseline, &levels, &metrics, &opts, None)?;
            if let Some(p) = &a.accuracy {
                let acc = read_vector(p)?;
                if acc.len() != levels.len() {
                    return Err(Error::LengthMismatch(acc.len(), levels.len()));
                }
                series = series.with_accuracy(acc)?;
            }
            series_report(&series, &metrics, a, &mut report)?;
        }
        _ => return Err(Error::InvalidParameter("give exactly one of --current or --sweep".into())),
    }
    Ok(Outcome { report: Some(report), checks_failed: false })
}

/// Path of the parameter sidecar written next to a transformed matrix.
pub fn sidecar_path(output: &Path) -> PathBuf {
    let mut s = output.as_os_str().to_owned();
    s.push(".json");
    PathBuf::from(s)
}

pub(crate) fn transform(a: &TransformArgs, cfg: &RunConfig) -> Result<Outcome> {
    let kind: EncoderKind = a.encoder.parse()?;
    let output =
        a.common.output.as_deref().ok_or_else(|| Error::InvalidParameter("transform needs --output".into()))?;
    let format = match a.format.as_deref() {
        None => MatrixFormat::from_path(output),
        Some("csv") => MatrixFormat::Csv,
        Some("gstb") => MatrixFormat::Gstb,
        Some(f) => return Err(Error::InvalidParameter(format!("unknown format '{f}'"))),
    };
    let x = read_matrix(&a.input)?;
    let t = EncoderTransform::new(kind, cfg.seed);
    let y = apply_encoder(&x, &t)?;
    write_matrix(output, &y, format)?;
    let params = json!({
        "input": path_str(&a.input),
        "encoder": kind.to_string(),
        "transform": t,
        "output": path_str(output),
        "format": match format { MatrixFormat::Csv => "csv", MatrixFormat::Gstb => "gstb" },
    });
    let mut report = ReportFile::new("transform", cfg.seed, params);
    report.results.push(ResultEntry::new("rows", y.nrows() as f64));
    report.results.push(ResultEntry::new("cols", y.ncols() as f64));
    report.write(&sidecar_path(output))?;
    Ok(Outcome { report: None, checks_failed: false })
}

fn read_pair(spec: &str) -> Result<(EmbeddingMatrix, LabelVector)> {
    let (xp, yp) =
        spec.split_once(',').ok_or_else(|| Error::InvalidParameter(format!("'{spec}' must be FEATURES,LABELS")))?;
    let x = read_matrix(Path::new(xp.trim()))?;
    let y = read_labels(Path::new(yp.trim()))?;
    y.check_rows(x.nrows())?;
    Ok((x, y))
}

enum Control {
    Shuffled,
    Random(usize),
}

fn parse_controls(list: &[String]) -> Result<Vec<Control>> {
    list.iter()
        .map(|c| match c.trim() {
            "shuffled" => Ok(Control::Shuffled),
            s => s
                .strip_prefix("random:")
                .and_then(|m| m.parse::<usize>().ok())
                .filter(|m| *m > 0)
                .map(Control::Random)
                .ok_or_else(|| Error::InvalidParameter(format!("unknown control '{s}'"))),
        })
        .collect()
}

pub(crate) fn steer(a: &SteerArgs, cfg: &RunConfig) -> Result<Outcome> {
    let controls = parse_controls(&a.controls)?;
    let alphas = a.alphas.clone().unwrap_or_else(default_alphas);
    let (x_train, y_train) = read_pair(&a.train)?;
    let (x_test, y_test) = read_pair(&a.test)?;
    let probe_cfg = ProbeConfig { l2_penalty: a.l2, ..ProbeConfig::default() };
    let params = merge(
        cfg.echo(),
        json!({
            "train": a.train,
            "test": a.test,
            "alphas": alphas,
            "controls": a.controls,
            "l2_penalty": probe_cfg.l2_penalty,
            "grad_tol": probe_cfg.grad_tol,
            "max_iter": probe_cfg.max_iter,
        }),
    );
    let mut report = ReportFile::new("steer", cfg.seed, params);
    let probe = train_linear_probe(&x_train, &y_train, &probe_cfg)?;
    if !probe.converged {
        report.warnings.push(format!(
            "probe stopped after {} iterations with gradient norm {}",
            probe.iterations, probe.grad_norm
        ));
    }
    let direction = steering_direction(&probe)?;
    let sweep = steering_sweep(&probe, &x_test, &y_test, &direction, &alphas)?;
    report.results.push(ResultEntry::new("baseline_accuracy", sweep.baseline_accuracy).with_aux(json!({
        "iterations": probe.iterations,
        "grad_norm": probe.grad_norm,
        "converged": probe.converged,
    })));
    report.results.push(
        ResultEntry::new("max_drop", sweep.max_drop)
            .with_aux(json!({ "alphas": sweep.alphas, "accuracy": sweep.accuracy })),
    );
    let root = RandomStream::new(cfg.seed);
    for c in controls {
        match c {
            Control::Random(m) => {
                let ctl = random_direction_control(
                    &probe,
                    &x_test,
                    &y_test,
                    &alphas,
                    m,
                    &root.substream(RANDOM_CONTROL_TAG),
                )?;
                report.results.push(
                    ResultEntry::new("random_mean_drop", ctl.mean_drop).with_aux(json!({ "m": m, "drops": ctl.drops })),
                );
                if ctl.mean_drop > 0.0 {
                    report.results.push(ResultEntry::new("true_to_random_ratio", sweep.max_drop / ctl.mean_drop));
                } else {
                    report.warnings.push("random directions caused no accuracy drop; ratio undefined".into());
                }
            }
            Control::Shuffled => {
                let sc = cfg.shesha();
                let metric = |x: &EmbeddingMatrix, y: &LabelVector| shesha_supervised_rdm(x, y, &sc);
                let observed = metric(&x_train, &y_train)?;
                let shuffled =
                    shuffled_label_control(&x_train, &y_train, metric, &root.substream(SHUFFLE_CONTROL_TAG))?;
                report.results.push(ResultEntry::new("supervised_rdm", observed));
                report.results.push(ResultEntry::new("shuffled_supervised_rdm", shuffled));
            }
        }
    }
    Ok(Outcome { report: Some(report), checks_failed: false })
}
