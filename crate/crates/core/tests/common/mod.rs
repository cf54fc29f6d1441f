//! Independent oracles shared by the integration tests and the acceptance
//! suite. Nothing here calls the code paths it is used to check.

#![allow(dead_code)]

mod dd;

use dd::Dd;
use fnn_interference::dataset::{MaskImage, Observation};
use fnn_interference::network::{ActivationKind, ActivationSpec, Layer, Network};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Which parameter of a layer to perturb.
#[derive(Clone, Copy, Debug)]
pub enum Param {
    Weight(usize),
    Bias(usize),
    Alpha,
}

/// Every parameter of every layer, alphas only where trainable.
pub fn all_params(net: &Network) -> Vec<(usize, Param)> {
    let mut out = Vec::new();
    for (k, l) in net.layers().iter().enumerate() {
        out.extend((0..l.weights().len()).map(|i| (k, Param::Weight(i))));
        out.extend((0..l.n_out()).map(|i| (k, Param::Bias(i))));
        if l.activation.learns_alpha() {
            out.push((k, Param::Alpha));
        }
    }
    out
}

/// Copy of `net` with one parameter shifted by `delta`, rebuilt through the
/// public constructors.
pub fn perturbed(net: &Network, layer: usize, param: Param, delta: f64) -> Network {
    let layers = net
        .layers()
        .iter()
        .enumerate()
        .map(|(k, l)| {
            let mut w = l.weights().to_vec();
            let mut b = l.biases().to_vec();
            let mut spec = l.activation;
            if k == layer {
                match param {
                    Param::Weight(i) => w[i] += delta,
                    Param::Bias(i) => b[i] += delta,
                    Param::Alpha => spec.alpha += delta,
                }
            }
            Layer::new(l.n_in(), w, b, spec).unwrap()
        })
        .collect();
    Network::new(net.input_arity(), layers).unwrap()
}

/// Squared error evaluated by a hand-written forward pass in f64.
pub fn loss_oracle(net: &Network, obs: &Observation) -> f64 {
    loss_dd(net, obs, None).to_f64()
}

/// Squared error in double-double, optionally with one parameter shifted by
/// `(layer, param, delta)`. The shift is applied exactly.
fn loss_dd(net: &Network, obs: &Observation, shift: Option<(usize, Param, Dd)>) -> Dd {
    let mut x: Vec<Dd> = obs.input.iter().map(|&v| Dd::from(v)).collect();
    for (k, l) in net.layers().iter().enumerate() {
        let here = shift.filter(|s| s.0 == k);
        let bump = |p: Param, v: f64| match here {
            Some((_, q, d)) if same(p, q) => Dd::from(v) + d,
            _ => Dd::from(v),
        };
        let alpha = bump(Param::Alpha, l.activation.alpha);
        x = (0..l.n_out())
            .map(|j| {
                let mut z = bump(Param::Bias(j), l.biases()[j]);
                for (i, (&w, &v)) in l.row(j).iter().zip(&x).enumerate() {
                    z = z + bump(Param::Weight(j * l.n_in() + i), w) * v;
                }
                let t = z.tanh();
                match l.activation.kind {
                    ActivationKind::Tanh => t,
                    ActivationKind::Blend => (Dd::ONE - alpha) * t + alpha * (-(z * z)).exp(),
                }
            })
            .collect();
    }
    let e = x[0] - Dd::from(obs.target);
    e * e
}

fn same(a: Param, b: Param) -> bool {
    match (a, b) {
        (Param::Weight(i), Param::Weight(j)) | (Param::Bias(i), Param::Bias(j)) => i == j,
        (Param::Alpha, Param::Alpha) => true,
        _ => false,
    }
}

/// Central finite difference of the loss with respect to one parameter,
/// computed in double-double so the only error left is truncation.
pub fn fd_gradient(net: &Network, obs: &Observation, layer: usize, param: Param, h: f64) -> f64 {
    let plus = loss_dd(net, obs, Some((layer, param, Dd::from(h))));
    let minus = loss_dd(net, obs, Some((layer, param, Dd::from(-h))));
    ((plus - minus) / Dd::from(2.0 * h)).to_f64()
}

/// Relative error with an absolute floor for values near zero.
pub fn agrees(analytic: f64, numeric: f64, rel: f64, abs: f64) -> bool {
    let diff = (analytic - numeric).abs();
    diff <= abs || diff <= rel * analytic.abs().max(numeric.abs())
}

pub fn random_observation(r: &mut ChaCha8Rng) -> Observation {
    Observation {
        input: [r.random_range(-0.5..=0.5), r.random_range(-0.5..=0.5)],
        target: r.random_range(-0.5..=0.5),
    }
}

/// Random network of the given shape with weights scaled up to `scale`.
pub fn random_network(
    r: &mut ChaCha8Rng,
    arch: &[usize],
    acts: &[ActivationSpec],
    scale: f64,
) -> Network {
    let layers = arch
        .windows(2)
        .zip(acts)
        .map(|(p, spec)| {
            let w = (0..p[0] * p[1])
                .map(|_| r.random_range(-scale..scale))
                .collect();
            let b = (0..p[1]).map(|_| r.random_range(-scale..scale)).collect();
            Layer::new(p[0], w, b, *spec).unwrap()
        })
        .collect();
    Network::new(arch[0], layers).unwrap()
}

/// Random line through a random point of the data square: `(w1, w2, b)`.
pub fn random_line(r: &mut ChaCha8Rng) -> (f64, f64, f64) {
    let phi: f64 = r.random_range(0.0..std::f64::consts::TAU);
    let scale: f64 = r.random_range(0.2..5.0);
    let (px, py): (f64, f64) = (r.random_range(-0.6..0.6), r.random_range(-0.6..0.6));
    let (w1, w2) = (scale * phi.cos(), scale * phi.sin());
    (w1, w2, -(w1 * px + w2 * py))
}

pub fn random_mask(r: &mut ChaCha8Rng, size: usize) -> MaskImage {
    loop {
        let flags: Vec<bool> = (0..size * size).map(|_| r.random_bool(0.5)).collect();
        if let Ok(m) = MaskImage::new(size, flags) {
            return m;
        }
    }
}

/// Brute-force crossing counter: parametric line intersection and an
/// exhaustive nearest-pixel search.
pub fn crossings_oracle(lines: &[(f64, f64, f64)], mask: &MaskImage) -> (usize, usize) {
    let size = mask.size();
    let param = |&(w1, w2, b): &(f64, f64, f64)| {
        let n2 = w1 * w1 + w2 * w2;
        let n = n2.sqrt();
        ([-b * w1 / n2, -b * w2 / n2], [-w2 / n, w1 / n])
    };
    let (mut train, mut gen) = (0, 0);
    for i in 0..lines.len() {
        for j in i + 1..lines.len() {
            let (p, d) = param(&lines[i]);
            let (q, e) = param(&lines[j]);
            let cross = d[0] * e[1] - d[1] * e[0];
            if cross.abs() < 1e-9 {
                continue;
            }
            let s = ((q[0] - p[0]) * e[1] - (q[1] - p[1]) * e[0]) / cross;
            let (x, y) = (p[0] + s * d[0], p[1] + s * d[1]);
            if x.abs() > 0.5 || y.abs() > 0.5 {
                continue;
            }
            let mut best = (f64::INFINITY, 0, 0);
            for iy in 0..size {
                for ix in 0..size {
                    let cx = ix as f64 / (size - 1) as f64 - 0.5;
                    let cy = iy as f64 / (size - 1) as f64 - 0.5;
                    let dist = (cx - x).powi(2) + (cy - y).powi(2);
                    if dist < best.0 {
                        best = (dist, ix, iy);
                    }
                }
            }
            if mask.flags()[best.2 * size + best.1] {
                train += 1;
            } else {
                gen += 1;
            }
        }
    }
    (train, gen)
}

/// Two-pass unbiased variance per pixel.
pub fn variance_oracle(samples: &[Vec<f64>]) -> Vec<f64> {
    let n = samples.len() as f64;
    (0..samples[0].len())
        .map(|p| {
            let mean = samples.iter().map(|s| s[p]).sum::<f64>() / n;
            samples.iter().map(|s| (s[p] - mean).powi(2)).sum::<f64>() / (n - 1.0)
        })
        .collect()
}

/// Canonical P5 file of a square image with random bytes.
pub fn random_pgm(r: &mut ChaCha8Rng, max_size: usize) -> Vec<u8> {
    let size = r.random_range(1..=max_size);
    let mut bytes = format!("P5\n{size} {size}\n255\n").into_bytes();
    bytes.extend((0..size * size).map(|_| r.random::<u8>()));
    bytes
}

/// Malformed inputs, each paired with the name of the defect the reader must report.
pub fn malformed_pgms() -> Vec<(&'static str, Vec<u8>)> {
    let with = |h: &str, n: usize| {
        let mut v = h.as_bytes().to_vec();
        v.extend(std::iter::repeat_n(7u8, n));
        v
    };
    vec![
        ("BadMagic", b"P6\n2 2\n255\n\0\0\0\0".to_vec()),
        ("BadMagic", Vec::new()),
        ("MissingField", b"P5\n2".to_vec()),
        ("InvalidNumber", with("P5\n2a 2\n255\n", 4)),
        ("ZeroDimension", with("P5\n0 0\n255\n", 0)),
        ("NotSquare", with("P5\n4 2\n255\n", 8)),
        ("UnsupportedMaxval", with("P5\n2 2\n65535\n", 8)),
        ("MissingSeparator", with("P5\n2 2\n255", 0)),
        ("Truncated", with("P5\n64 64\n255\n", 100)),
        ("TrailingBytes", with("P5\n2 2\n255\n", 6)),
    ]
}
