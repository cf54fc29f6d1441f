mod common;

use common::{malformed_pgms, random_pgm, rng};
use fnn_interference::dataset::{
    brightness_to_value, build_dataset, generate_theta_c, generate_theta_l, load_pgm,
    pixel_to_coords, save_pgm, value_to_brightness, GrayImage, MaskImage, Stripe, ThetaCParams,
    ThetaLParams,
};
use fnn_interference::geometry::Hyperplane2;
use fnn_interference::imaging::{render_hyperplane_diagram, sample_generalization, DiagramStyle};
use fnn_interference::network::{init_network, network_from_text, network_to_text, ActivationSpec};
use proptest::prelude::*;
use rand::seq::SliceRandom;

/// Distance from `p` to the line through `a` and `b`, via the cross product.
fn line_distance(p: [f64; 2], a: [f64; 2], b: [f64; 2]) -> f64 {
    let (dx, dy) = (b[0] - a[0], b[1] - a[1]);
    ((p[0] - a[0]) * dy - (p[1] - a[1]) * dx).abs() / dx.hypot(dy)
}

fn second_point(s: &Stripe) -> [f64; 2] {
    let t = s.angle_deg.to_radians();
    [s.point[0] + t.cos(), s.point[1] + t.sin()]
}

#[test]
fn theta_l_bright_pixels_lie_in_the_bands() {
    let p = ThetaLParams::default();
    let img = generate_theta_l(64, &p).unwrap();
    for iy in 0..64 {
        for ix in 0..64 {
            let (x, y) = pixel_to_coords(ix, iy, 64).unwrap();
            let ds = line_distance([x, y], p.solid.point, second_point(&p.solid));
            let dd = line_distance([x, y], p.dashed.point, second_point(&p.dashed));
            if img.get(ix, iy) > 0.0 {
                assert!(ds <= p.solid.half_width + 1e-12 || dd <= p.dashed.half_width + 1e-12);
            }
            if ds < p.solid.half_width - 1e-12 {
                assert_eq!(img.get(ix, iy), 0.5, "solid band must be unbroken");
            }
        }
    }
}

#[test]
fn theta_c_bright_pixels_lie_in_band_or_annulus() {
    let p = ThetaCParams::default();
    let img = generate_theta_c(64, &p).unwrap();
    let mut bright = 0;
    for iy in 0..64 {
        for ix in 0..64 {
            let (x, y) = pixel_to_coords(ix, iy, 64).unwrap();
            let ds = line_distance([x, y], p.stripe.point, second_point(&p.stripe));
            let dc = ((x - p.ring_center[0]).powi(2) + (y - p.ring_center[1]).powi(2)).sqrt();
            let in_ring = (dc - p.ring_radius).abs() <= p.ring_thickness / 2.0 + 1e-12;
            if img.get(ix, iy) > 0.0 {
                bright += 1;
                assert!(ds <= p.stripe.half_width + 1e-12 || in_ring);
            }
        }
    }
    assert!(bright > 200);
}

#[test]
fn pgm_round_trip_on_random_files() {
    let mut r = rng(1);
    for _ in 0..200 {
        let bytes = random_pgm(&mut r, 40);
        assert_eq!(save_pgm(&load_pgm(&bytes).unwrap()), bytes);
    }
}

#[test]
fn malformed_files_name_their_defect() {
    for (name, bytes) in malformed_pgms() {
        let err = load_pgm(&bytes).unwrap_err();
        assert!(format!("{err:?}").starts_with(name), "{name}: got {err:?}");
    }
}

#[test]
fn saved_network_samples_identically() {
    let net = init_network(&[2, 16, 16, 1], &[ActivationSpec::tanh(); 3], 31).unwrap();
    let loaded = network_from_text(&network_to_text(&net)).unwrap();
    assert_eq!(
        sample_generalization(&net, 64).unwrap(),
        sample_generalization(&loaded, 64).unwrap()
    );
}

#[test]
fn diagrams_ignore_line_order() {
    let mut r = rng(12);
    let mut hs: Vec<Hyperplane2> = (0..16)
        .map(|_| {
            let (a, b, c) = common::random_line(&mut r);
            Hyperplane2::new(a, b, c).unwrap()
        })
        .collect();
    let style = DiagramStyle::default();
    let a = render_hyperplane_diagram(&hs, 96, &style).unwrap();
    hs.shuffle(&mut r);
    assert_eq!(render_hyperplane_diagram(&hs, 96, &style).unwrap(), a);
}

proptest! {
    #[test]
    fn quantization_stays_within_half_a_step(v in -2.0f64..2.0) {
        let back = brightness_to_value(value_to_brightness(v));
        prop_assert!((back - v.clamp(-0.5, 0.5)).abs() <= 1.0 / 510.0 + 1e-15);
    }

    #[test]
    fn byte_exact_images_survive_save_and_load(bytes in proptest::collection::vec(any::<u8>(), 9)) {
        let img = GrayImage::new(3, bytes.iter().map(|&b| brightness_to_value(b)).collect()).unwrap();
        prop_assert_eq!(load_pgm(&save_pgm(&img)).unwrap(), img);
    }

    #[test]
    fn dataset_partitions_every_pixel(flags in proptest::collection::vec(any::<bool>(), 64)) {
        prop_assume!(flags.iter().any(|&f| f) && flags.iter().any(|&f| !f));
        let img = GrayImage::filled(8, 0.1).unwrap();
        let mask = MaskImage::new(8, flags.clone()).unwrap();
        let ds = build_dataset(&img, &mask).unwrap();
        prop_assert_eq!(ds.training.len() + ds.generalized.len(), 64);
        let mut seen: Vec<[u64; 2]> = ds.training.iter().chain(&ds.generalized)
            .map(|o| [o.input[0].to_bits(), o.input[1].to_bits()])
            .collect();
        seen.sort();
        seen.dedup();
        prop_assert_eq!(seen.len(), 64);
        prop_assert_eq!(ds.training.len(), flags.iter().filter(|&&f| f).count());
    }
}
