//! Noise-sweep drift series with detection thresholds and false alarms.

use geostab::drift::{build_drift_series, DriftMetric, DriftOptions};
use geostab::inference::{
    detection_threshold, early_warning_compare, false_alarm_rate, DETECTION_THRESHOLD, STABLE_ACCURACY_DROP,
};
use geostab::numerics::EmbeddingMatrix;
use geostab::synthetic::{gen_mixed, MixedSpec};

fn main() -> geostab::Result<()> {
    let baseline = gen_mixed(&MixedSpec::default())?;
    let levels = [0.0, 0.01, 0.02, 0.05, 0.1, 0.15, 0.2, 0.25, 0.3, 0.4, 0.5];
    let metrics = [DriftMetric::Shesha, DriftMetric::Cka, DriftMetric::Procrustes, DriftMetric::RdmPearson];
    // stand-in downstream score: fraction of rows whose summed first 16 features keep their sign
    let score = |m: &EmbeddingMatrix, i: usize| (0..16).map(|j| m.get(i, j)).sum::<f64>();
    let sign: Vec<bool> = (0..baseline.nrows()).map(|i| score(&baseline, i) > 0.0).collect();
    let accuracy = |m: &EmbeddingMatrix| -> geostab::Result<f64> {
        let kept = (0..m.nrows()).filter(|&i| (score(m, i) > 0.0) == sign[i]).count();
        Ok(kept as f64 / m.nrows() as f64)
    };
    let series = build_drift_series(&baseline, &levels, &metrics, &DriftOptions::default(), Some(&accuracy))?;
    print!("{:>6}", "sigma");
    for m in metrics {
        print!("{:>12}", m.as_str());
    }
    println!("{:>10}", "accuracy");
    for (i, level) in series.levels().iter().enumerate() {
        print!("{level:>6.2}");
        for m in metrics {
            print!("{:>12.4}", series.drift(m)?[i]);
        }
        println!("{:>10.3}", series.accuracy().unwrap()[i]);
    }
    for m in metrics {
        let far = match false_alarm_rate(&series, m, DETECTION_THRESHOLD, STABLE_ACCURACY_DROP) {
            Ok(r) => format!("{r:.2}"),
            Err(e) => e.to_string(),
        };
        println!(
            "{}: detected at {:?}, false alarm rate {far}",
            m.as_str(),
            detection_threshold(&series, m, DETECTION_THRESHOLD)?
        );
    }
    let first = early_warning_compare(&series, DriftMetric::Shesha, &series, DriftMetric::Cka, DETECTION_THRESHOLD)?;
    println!("early warning: {first:?}");
    Ok(())
}
