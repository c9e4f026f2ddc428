//! Probe training, steering sweep and the two controls.

use geostab::drift::{
    default_alphas, random_direction_control, shuffled_label_control, steering_direction, steering_sweep,
    train_linear_probe, ProbeConfig,
};
use geostab::numerics::RandomStream;
use geostab::stability::{shesha_supervised_rdm, SheshaConfig};
use geostab::synthetic::{gen_two_class, TwoClassSpec};

fn main() -> geostab::Result<()> {
    let spec = TwoClassSpec { separation: 2.0, ..TwoClassSpec::default() };
    let (x_train, y_train) = gen_two_class(&spec, 0)?;
    let (x_test, y_test) = gen_two_class(&spec, 1)?;
    let probe = train_linear_probe(&x_train, &y_train, &ProbeConfig::default())?;
    println!("probe converged {} after {} iterations", probe.converged, probe.iterations);
    let direction = steering_direction(&probe)?;
    let alphas = default_alphas();
    let sweep = steering_sweep(&probe, &x_test, &y_test, &direction, &alphas)?;
    for (a, acc) in sweep.alphas.iter().zip(&sweep.accuracy) {
        println!("alpha {a:+.1}: accuracy {acc:.3}");
    }
    let stream = RandomStream::new(320);
    let random = random_direction_control(&probe, &x_test, &y_test, &alphas, 20, &stream)?;
    println!(
        "max drop {:.3}; random directions {:.3}; ratio {:.1}",
        sweep.max_drop,
        random.mean_drop,
        sweep.max_drop / random.mean_drop
    );
    let cfg = SheshaConfig::default();
    let metric = |x: &_, y: &_| shesha_supervised_rdm(x, y, &cfg);
    println!(
        "supervised RDM {:.3}, shuffled labels {:.3}",
        metric(&x_train, &y_train)?,
        shuffled_label_control(&x_train, &y_train, metric, &stream.substream(1))?
    );
    Ok(())
}
