//! RDMs, rank correlation and PCA on a small mixed-signal matrix.

use geostab::numerics::{compute_rdm, pca, spearman, DistanceKind};
use geostab::synthetic::{gen_mixed, MixedSpec};

fn main() -> geostab::Result<()> {
    let spec = MixedSpec { n: 40, d: 32, k_latent: 4, ..MixedSpec::default().with_alpha(0.8) };
    let x = gen_mixed(&spec)?;
    let cos = compute_rdm(&x, DistanceKind::Cosine)?;
    let euc = compute_rdm(&x, DistanceKind::Euclidean)?;
    println!("{} rows -> {} condensed pairs", cos.n(), cos.condensed().len());
    println!("Spearman(cosine RDM, euclidean RDM) = {:.4}", spearman(cos.condensed(), euc.condensed())?);
    let (scores, singular_values) = pca(&x, 5)?;
    let total: f64 = singular_values.iter().map(|s| s * s).sum();
    let top: f64 = singular_values.iter().take(4).map(|s| s * s).sum();
    println!("PCA scores {}x{}; top-4 variance share {:.3}", scores.nrows(), scores.ncols(), top / total);
    Ok(())
}
