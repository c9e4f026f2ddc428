//! Cross-representation similarity of a matrix and its encoded views.

use geostab::numerics::DistanceKind;
use geostab::similarity::{
    debiased_cka, linear_cka, mmd_rbf, procrustes_similarity, pwcka_effective_rank, rsa_spearman, subspace_overlap,
    PWCKA_VARIANCE,
};
use geostab::synthetic::{apply_encoder, gen_mixed, EncoderKind, EncoderTransform, MixedSpec};

fn main() -> geostab::Result<()> {
    let x = gen_mixed(&MixedSpec::default().with_alpha(0.7))?;
    for spec in ["random_projection:k=64", "pca:k=10", "noise:sigma=0.5"] {
        let kind: EncoderKind = spec.parse()?;
        let y = apply_encoder(&x, &EncoderTransform::new(kind, 1))?;
        let pw = pwcka_effective_rank(&x, &y, PWCKA_VARIANCE)?;
        println!(
            "{spec:24} cka {:.3}  debiased {:.3}  pwcka {:.3} (k={:?})  procrustes {:.3}  rsa {:.3}  overlap@5 {:.3}",
            linear_cka(&x, &y)?,
            debiased_cka(&x, &y)?,
            pw.value,
            pw.aux,
            procrustes_similarity(&x, &y)?,
            rsa_spearman(&x, &y, DistanceKind::Cosine)?,
            subspace_overlap(&x, &y, 5)?,
        );
    }
    let y = apply_encoder(&x, &EncoderTransform::new(EncoderKind::Noise { sigma: 0.5 }, 1))?;
    println!("unbiased MMD^2 vs noisy copy {:.5}", mmd_rbf(&x, &y, None)?);
    Ok(())
}
