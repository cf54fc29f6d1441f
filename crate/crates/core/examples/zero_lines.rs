//! Inspects the first-layer zero lines of a trained network: where they lie,
//! where they cross relative to the training mask, how much of the held-out
//! region sits in some neuron's strong band, and what the diagram looks like.
//!
//! ```text
//! cargo run --release --example zero_lines -- [network-file]
//! ```
//!
//! Without an argument a network is trained on theta_c for 100k iterations.

use fnn_interference::dataset::{
    build_dataset, generate_mask, generate_theta_c, save_pgm, MaskParams, ThetaCParams,
};
use fnn_interference::geometry::{
    crossings_in_region, first_layer_hyperplanes, in_strong_region, StrongRegionSpec, ZeroSet,
};
use fnn_interference::imaging::{render_hyperplane_diagram, DiagramStyle};
use fnn_interference::network::{init_network, network_from_text, ActivationSpec, Network};
use fnn_interference::training::{train, TrainConfig};

fn main() -> fnn_interference::Result<()> {
    let image = generate_theta_c(64, &ThetaCParams::default())?;
    let mask = generate_mask(64, &MaskParams::default())?;
    let ds = build_dataset(&image, &mask)?;

    let net: Network = match std::env::args().nth(1) {
        Some(path) => network_from_text(&std::fs::read_to_string(path).expect("read network"))?,
        None => {
            let mut net = init_network(&[2, 16, 16, 1], &[ActivationSpec::tanh(); 3], 3)?;
            train(
                &mut net,
                &ds,
                &TrainConfig::new(0.02, 2e-7, 100_000),
                |_, _| {},
            )?;
            net
        }
    };

    let mut lines = Vec::new();
    for (j, z) in first_layer_hyperplanes(&net)?.into_iter().enumerate() {
        match z {
            ZeroSet::Line(h) => {
                let (p, d) = h.point_and_direction();
                let angle = d[1].atan2(d[0]).to_degrees().rem_euclid(180.0);
                println!(
                    "neuron {j:>2}: through ({:+.3}, {:+.3}) at {angle:5.1} deg, |w| = {:.2}",
                    p[0],
                    p[1],
                    h.normal_norm()
                );
                lines.push(h);
            }
            ZeroSet::Degenerate { bias } => println!("neuron {j:>2}: no zero line (bias {bias})"),
        }
    }

    let c = crossings_in_region(&lines, &mask, 64)?;
    println!(
        "crossings inside the data square: {} on training pixels, {} on held-out pixels",
        c.in_training, c.in_generalized
    );

    let strong = StrongRegionSpec::new(StrongRegionSpec::DEFAULT_HALF_WIDTH)?;
    let covered = ds
        .generalized
        .iter()
        .filter(|o| lines.iter().any(|h| in_strong_region(h, o.input, &strong)))
        .count();
    println!(
        "held-out points within {} of some zero line: {covered} of {}",
        strong.half_width(),
        ds.generalized.len()
    );

    let diagram = render_hyperplane_diagram(&lines, 256, &DiagramStyle::default())?;
    std::fs::write("zero_lines.pgm", save_pgm(&diagram)).expect("write diagram");
    println!("wrote zero_lines.pgm");
    Ok(())
}
