//! Trains one 2-16-16-1 network on the theta_l training subset, reporting the
//! error on both halves of the data at a few checkpoints, then saves the
//! network and its sampled function.
//!
//! ```text
//! cargo run --release --example train_single -- [iterations] [seed]
//! ```

use fnn_interference::dataset::{
    build_dataset, generate_mask, generate_theta_l, save_pgm, MaskParams, ThetaLParams,
};
use fnn_interference::imaging::sample_generalization;
use fnn_interference::network::{init_network, network_to_text, ActivationSpec};
use fnn_interference::training::{
    geometric_checkpoints, mean_error, mean_training_error, train, TrainConfig,
};

fn main() -> fnn_interference::Result<()> {
    let mut args = std::env::args().skip(1);
    let iterations: u64 = args
        .next()
        .map_or(200_000, |s| s.parse().expect("iterations"));
    let seed: u64 = args.next().map_or(1, |s| s.parse().expect("seed"));

    let image = generate_theta_l(64, &ThetaLParams::default())?;
    let mask = generate_mask(64, &MaskParams::default())?;
    let ds = build_dataset(&image, &mask)?;

    let mut net = init_network(&[2, 16, 16, 1], &[ActivationSpec::tanh(); 3], seed)?;
    println!(
        "initial training error {:.5}",
        mean_training_error(&net, &ds)?
    );

    let cfg = TrainConfig {
        checkpoint_iterations: geometric_checkpoints(iterations / 100, iterations, 5)?,
        sample_seed: seed,
        ..TrainConfig::new(0.02, 2e-7, iterations)
    };
    train(&mut net, &ds, &cfg, |it, n| {
        let train_err = mean_training_error(n, &ds).unwrap();
        let gen_err = mean_error(n, &ds.generalized).unwrap();
        println!("{it:>9}  training {train_err:.5}  generalized {gen_err:.5}");
    })?;

    std::fs::write("train_single.net", network_to_text(&net)).expect("write network");
    std::fs::write(
        "train_single.pgm",
        save_pgm(&sample_generalization(&net, 64)?),
    )
    .expect("write image");
    println!("wrote train_single.net and train_single.pgm");
    Ok(())
}
