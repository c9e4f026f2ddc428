//! Synthetic generators: mixed signal, power-law spectra, quadrant pairs.

use geostab::similarity::debiased_cka;
use geostab::stability::shesha_feature_split;
use geostab::synthetic::{
    gen_mixed, gen_power_law, gen_quadrants, spectral_delete, validation_shesha_config, MixedSpec,
};

fn main() -> geostab::Result<()> {
    let cfg = validation_shesha_config(320);
    for alpha in [0.0, 0.25, 0.5, 0.75, 1.0] {
        let x = gen_mixed(&MixedSpec::default().with_alpha(alpha))?;
        println!("mixed alpha {alpha:.2}: shesha {:.3}", shesha_feature_split(&x, &cfg)?.value);
    }
    let base = gen_power_law(200, 256, 320)?;
    for k in [0, 1, 5, 10] {
        let x = spectral_delete(&base, k)?;
        println!(
            "power law, top {k:2} removed: shesha {:.3}, debiased CKA to base {:.3}",
            shesha_feature_split(&x, &cfg)?.value,
            debiased_cka(&base, &x)?
        );
    }
    for p in gen_quadrants(1, 320)? {
        println!(
            "{:?}: shesha {:.3}, debiased CKA {:.3} (attempts {})",
            p.quadrant,
            shesha_feature_split(&p.x, &cfg)?.value,
            debiased_cka(&p.x, &p.y)?,
            p.attempts
        );
    }
    Ok(())
}
