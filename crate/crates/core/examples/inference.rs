//! Bootstrap intervals, permutation nulls, partial rank correlation, ROC.

use geostab::inference::{bootstrap_ci, partial_spearman, permutation_null_centroid, roc_auc, sensitivity_at_fpr};
use geostab::numerics::{pearson, RandomStream};
use geostab::synthetic::{gen_mixed, MixedSpec};

fn main() -> geostab::Result<()> {
    let x = gen_mixed(&MixedSpec::default().with_alpha(0.8))?;
    let (a, b): (Vec<f64>, Vec<f64>) = (0..x.nrows()).map(|i| (x.get(i, 0), x.get(i, 1))).unzip();
    let stream = RandomStream::new(320);
    let ci = bootstrap_ci(
        x.nrows(),
        |rows| {
            let sa: Vec<f64> = rows.iter().map(|&r| a[r]).collect();
            let sb: Vec<f64> = rows.iter().map(|&r| b[r]).collect();
            pearson(&sa, &sb)
        },
        2000,
        0.95,
        &stream,
    )?;
    println!("Pearson {:.3}, 95% CI [{:.3}, {:.3}]", ci.point, ci.ci_low, ci.ci_high);

    let null = permutation_null_centroid(&x, x.nrows() / 2, 500, &stream.substream(1))?;
    println!(
        "centroid drift {:.4}, null {:.4} +- {:.4}, z {:.2}",
        null.observed, null.null_mean, null.null_std, null.z
    );

    let c: Vec<f64> = (0..x.nrows()).map(|i| x.get(i, 2)).collect();
    println!("partial Spearman(a, b | c) = {:.3}", partial_spearman(&a, &b, &[c])?);

    let scores: Vec<f64> = (0..20).map(|i| i as f64 + if i % 3 == 0 { 5.0 } else { 0.0 }).collect();
    let truth: Vec<bool> = (0..20).map(|i| i >= 10).collect();
    println!(
        "AUC {:.3}, sensitivity at 10% FPR {:.3}",
        roc_auc(&scores, &truth)?,
        sensitivity_at_fpr(&scores, &truth, 0.1)?
    );
    Ok(())
}
