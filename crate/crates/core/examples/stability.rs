//! Shesha variants: unsupervised splits and label-aware scores.

use geostab::stability::{
    shesha_feature_split, shesha_label_conditioned, shesha_sample_split, shesha_supervised_rdm, shesha_variance_ratio,
    LabelVector, SheshaConfig, DEFAULT_ANCHORS,
};
use geostab::synthetic::{gen_mixed, MixedSpec};

fn main() -> geostab::Result<()> {
    let cfg = SheshaConfig::default();
    for alpha in [0.0, 0.5, 1.0] {
        let x = gen_mixed(&MixedSpec::default().with_alpha(alpha))?;
        let fs = shesha_feature_split(&x, &cfg)?;
        let ss = shesha_sample_split(&x, &cfg, DEFAULT_ANCHORS)?;
        println!("alpha {alpha:.1}: feature split {:.3}, sample split {:.3}", fs.value, ss.value);
    }
    // labels from the sign pattern of the first two features: 4 classes
    let x = gen_mixed(&MixedSpec::default().with_alpha(0.9))?;
    let labels: Vec<usize> =
        (0..x.nrows()).map(|i| usize::from(x.get(i, 0) > 0.0) * 2 + usize::from(x.get(i, 1) > 0.0)).collect();
    let y = LabelVector::new(labels)?;
    println!("label-conditioned {:.3}", shesha_label_conditioned(&x, &y, &cfg)?.value);
    println!("supervised RDM    {:.3}", shesha_supervised_rdm(&x, &y, &cfg)?);
    println!("variance ratio    {:.3}", shesha_variance_ratio(&x, &y)?);
    Ok(())
}
