//! The tanh / Gaussian blend activation: a value table across alpha, then a
//! short training run where the hidden layers learn their own alpha.
//!
//! ```text
//! cargo run --release --example blend_activation -- [iterations]
//! ```

use fnn_interference::dataset::{
    build_dataset, generate_mask, generate_theta_c, MaskParams, ThetaCParams,
};
use fnn_interference::network::{act, init_network, ActivationSpec};
use fnn_interference::training::{geometric_checkpoints, mean_training_error, train, TrainConfig};

fn main() -> fnn_interference::Result<()> {
    let iterations: u64 = std::env::args()
        .nth(1)
        .map_or(200_000, |s| s.parse().expect("iterations"));

    let alphas = [0.0, 0.25, 0.5, 0.75, 1.0];
    print!("     z");
    for a in alphas {
        print!("   a={a:<4}");
    }
    println!();
    for z in [-2.0, -1.0, -0.5, 0.0, 0.5, 1.0, 2.0] {
        print!("{z:>6.2}");
        for a in alphas {
            print!(" {:>+9.5}", act(&ActivationSpec::blend(a, false), z));
        }
        println!();
    }

    let image = generate_theta_c(64, &ThetaCParams::default())?;
    let ds = build_dataset(&image, &generate_mask(64, &MaskParams::default())?)?;
    let hidden = ActivationSpec::blend(0.5, true);
    let mut net = init_network(
        &[2, 16, 16, 1],
        &[hidden, hidden, ActivationSpec::tanh()],
        1,
    )?;

    let cfg = TrainConfig {
        checkpoint_iterations: geometric_checkpoints(iterations / 100, iterations, 5)?,
        ..TrainConfig::new(0.02, 2e-7, iterations)
    };
    println!("\niteration   alpha1   alpha2   training error");
    train(&mut net, &ds, &cfg, |it, n| {
        let a: Vec<f64> = n.layers().iter().map(|l| l.activation.alpha).collect();
        let err = mean_training_error(n, &ds).unwrap();
        println!("{it:>9}  {:.5}  {:.5}   {err:.5}", a[0], a[1]);
    })?;
    Ok(())
}
