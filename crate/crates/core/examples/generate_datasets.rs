//! Writes the two generated datasets and the training mask as PGM files and
//! prints a coarse text preview of each.
//!
//! ```text
//! cargo run --example generate_datasets -- [out-dir] [size]
//! ```

use std::path::PathBuf;

use fnn_interference::dataset::{
    build_dataset, generate_mask, generate_theta_c, generate_theta_l, save_pgm, GrayImage,
    MaskParams, ThetaCParams, ThetaLParams,
};

fn preview(img: &GrayImage, mask: Option<&fnn_interference::dataset::MaskImage>) {
    let step = (img.size() / 32).max(1);
    // row 0 is the bottom of the image, so print from the top down
    for iy in (0..img.size()).rev().step_by(step) {
        let line: String = (0..img.size())
            .step_by(step)
            .map(
                |ix| match (img.get(ix, iy) > 0.0, mask.map(|m| m.get(ix, iy))) {
                    (true, Some(false)) => 'o',
                    (true, _) => '#',
                    (false, Some(false)) => '.',
                    (false, _) => ' ',
                },
            )
            .collect();
        println!("  |{line}|");
    }
}

fn main() -> fnn_interference::Result<()> {
    let mut args = std::env::args().skip(1);
    let out = PathBuf::from(args.next().unwrap_or_else(|| "datasets".into()));
    let size: usize = args.next().map_or(64, |s| s.parse().expect("size"));
    std::fs::create_dir_all(&out).expect("create output directory");

    let theta_l = generate_theta_l(size, &ThetaLParams::default())?;
    let theta_c = generate_theta_c(size, &ThetaCParams::default())?;
    let mask = generate_mask(size, &MaskParams::default())?;

    for (name, img) in [
        ("theta_l.pgm", &theta_l),
        ("theta_c.pgm", &theta_c),
        ("mask.pgm", &mask.to_gray()),
    ] {
        std::fs::write(out.join(name), save_pgm(img)).expect("write image");
    }

    println!("'#' bright training pixel, 'o' bright held-out pixel, '.' dark held-out pixel");
    for (name, img) in [("theta_l", &theta_l), ("theta_c", &theta_c)] {
        let ds = build_dataset(img, &mask)?;
        println!(
            "{name}: {} training / {} generalized observations",
            ds.training.len(),
            ds.generalized.len()
        );
        preview(img, Some(&mask));
    }
    println!("wrote {}", out.display());
    Ok(())
}
