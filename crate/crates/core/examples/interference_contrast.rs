//! Runs the desk-scale replicate experiment on both generated sets and
//! compares their cross-replicate variance outside the training mask.
//!
//! ```text
//! cargo run --release --example interference_contrast -- [out-dir] [iterations]
//! ```

use std::path::PathBuf;

use fnn_interference::experiment::{
    compare_runs, run_experiment, DatasetSource, ExperimentConfig, MANIFEST_FILE,
};
use fnn_interference::training::geometric_checkpoints;

fn main() -> fnn_interference::Result<()> {
    let mut args = std::env::args().skip(1);
    let root = PathBuf::from(args.next().unwrap_or_else(|| "interference-runs".into()));
    let iterations: u64 = args
        .next()
        .map_or(1_000_000, |s| s.parse().expect("iteration count"));

    let mut manifests = Vec::new();
    for (name, source) in [
        ("theta_c", DatasetSource::ThetaC),
        ("theta_l", DatasetSource::ThetaL),
    ] {
        let mut cfg = ExperimentConfig::desk_scale(source, root.join(name));
        cfg.training.total_iterations = iterations;
        cfg.training.checkpoint_iterations = geometric_checkpoints(iterations / 10, iterations, 3)?;
        let manifest = run_experiment(&cfg)?;
        println!("{name}: {:.1}s", manifest.elapsed_seconds);
        for r in &manifest.replicates {
            println!(
                "  replicate {} (seed {}): training error {:.5} -> {:.5}",
                r.index, r.seed, r.initial_training_error, r.final_training_error
            );
        }
        manifests.push(cfg.experiment.output_dir.join(MANIFEST_FILE));
    }

    let cmp = compare_runs(&manifests[0], &manifests[1])?;
    print!("{}", cmp.to_text());
    match cmp.final_ratio() {
        Some(r) => {
            println!("theta_c / theta_l generalized variance at the last checkpoint: {r:.3}")
        }
        None => println!("ratio undefined"),
    }
    Ok(())
}
