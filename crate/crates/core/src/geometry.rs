//! Zero lines of first-hidden-layer neurons and the diagnostics built on them.
//!
//! A first-layer neuron with weights `(w1, w2)` and bias `b` outputs zero on
//! the line `w1*x + w2*y + b = 0`. Its activation slope is largest there, so
//! a band around the line is where the neuron propagates signals most
//! strongly.

use std::fmt::Write;

use crate::dataset::{nearest_index, Grid, MaskImage};
use crate::error::{Error, Result};
use crate::network::Network;

/// Determinants smaller than this are treated as parallel lines.
pub const PARALLEL_EPS: f64 = 1e-12;

/// The line `w1*x + w2*y + b = 0`; `(w1, w2)` is never zero.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Hyperplane2 {
    w1: f64,
    w2: f64,
    b: f64,
}

impl Hyperplane2 {
    pub fn new(w1: f64, w2: f64, b: f64) -> Result<Self> {
        if w1 == 0.0 && w2 == 0.0 {
            return Err(Error::domain("zero normal vector does not define a line"));
        }
        if !(w1.is_finite() && w2.is_finite() && b.is_finite()) {
            return Err(Error::domain("line coefficients must be finite"));
        }
        Ok(Hyperplane2 { w1, w2, b })
    }

    pub fn coefficients(&self) -> (f64, f64, f64) {
        (self.w1, self.w2, self.b)
    }

    /// Pre-activation `w1*x + w2*y + b` at `p`.
    pub fn eval(&self, p: [f64; 2]) -> f64 {
        self.w1 * p[0] + self.w2 * p[1] + self.b
    }

    pub fn normal_norm(&self) -> f64 {
        self.w1.hypot(self.w2)
    }

    /// Foot of the perpendicular from the origin and a unit direction vector.
    pub fn point_and_direction(&self) -> ([f64; 2], [f64; 2]) {
        let n2 = self.w1 * self.w1 + self.w2 * self.w2;
        let n = n2.sqrt();
        (
            [-self.b * self.w1 / n2, -self.b * self.w2 / n2],
            [-self.w2 / n, self.w1 / n],
        )
    }

    /// Intersection with `other`, or `None` when the lines are (nearly) parallel.
    pub fn intersection(&self, other: &Hyperplane2) -> Option<[f64; 2]> {
        let det = self.w1 * other.w2 - other.w1 * self.w2;
        if det.abs() < PARALLEL_EPS {
            return None;
        }
        let x = (self.w2 * other.b - other.w2 * self.b) / det;
        let y = (other.w1 * self.b - self.w1 * other.b) / det;
        Some([x, y])
    }
}

/// Zero set of one first-layer neuron.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum ZeroSet {
    Line(Hyperplane2),
    /// Both input weights are zero: the neuron's output does not depend on
    /// the input, so there is no zero line.
    Degenerate {
        bias: f64,
    },
}

impl ZeroSet {
    pub fn line(&self) -> Option<&Hyperplane2> {
        match self {
            ZeroSet::Line(h) => Some(h),
            ZeroSet::Degenerate { .. } => None,
        }
    }
}

/// One zero set per neuron of the first hidden layer, in neuron order.
pub fn first_layer_hyperplanes(net: &Network) -> Result<Vec<ZeroSet>> {
    if net.input_arity() != 2 {
        return Err(Error::domain(format!(
            "zero lines need a 2-input network, got {} inputs",
            net.input_arity()
        )));
    }
    let layer = &net.layers()[0];
    Ok((0..layer.n_out())
        .map(|j| {
            let row = layer.row(j);
            let b = layer.biases()[j];
            match Hyperplane2::new(row[0], row[1], b) {
                Ok(h) => ZeroSet::Line(h),
                Err(_) => ZeroSet::Degenerate { bias: b },
            }
        })
        .collect())
}

/// Just the non-degenerate lines of [`first_layer_hyperplanes`].
pub fn first_layer_lines(net: &Network) -> Result<Vec<Hyperplane2>> {
    Ok(first_layer_hyperplanes(net)?
        .iter()
        .filter_map(ZeroSet::line)
        .copied()
        .collect())
}

pub fn distance_to_hyperplane(h: &Hyperplane2, p: [f64; 2]) -> f64 {
    h.eval(p).abs() / h.normal_norm()
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct StrongRegionSpec {
    half_width: f64,
}

impl StrongRegionSpec {
    pub const DEFAULT_HALF_WIDTH: f64 = 0.25;

    pub fn new(half_width: f64) -> Result<Self> {
        if !(half_width > 0.0 && half_width.is_finite()) {
            return Err(Error::domain(format!(
                "strong-region half-width {half_width} must be positive"
            )));
        }
        Ok(StrongRegionSpec { half_width })
    }

    pub fn half_width(&self) -> f64 {
        self.half_width
    }
}

impl Default for StrongRegionSpec {
    fn default() -> Self {
        StrongRegionSpec {
            half_width: Self::DEFAULT_HALF_WIDTH,
        }
    }
}

/// Closed band of input-space points within `half_width` of the line.
pub fn in_strong_region(h: &Hyperplane2, p: [f64; 2], spec: &StrongRegionSpec) -> bool {
    distance_to_hyperplane(h, p) <= spec.half_width
}

/// Pre-activation variant of [`in_strong_region`]: `|w.p + b| <= threshold`.
///
/// With `threshold = 1` this keeps the points where the tanh slope is at
/// least `1 - tanh(1)^2`, about 0.42 of its peak.
pub fn in_strong_region_preactivation(h: &Hyperplane2, p: [f64; 2], threshold: f64) -> bool {
    h.eval(p).abs() <= threshold
}

/// Counts of pairwise zero-line crossings that land on training and on
/// generalized pixels.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct CrossingCounts {
    pub in_training: usize,
    pub in_generalized: usize,
}

/// Intersects every unordered pair of non-parallel lines. Crossings inside
/// the data square `[-0.5, 0.5]^2` are attributed to their nearest pixel and
/// counted by that pixel's mask class.
pub fn crossings_in_region(
    hs: &[Hyperplane2],
    mask: &MaskImage,
    size: usize,
) -> Result<CrossingCounts> {
    if size != mask.size() {
        return Err(Error::domain(format!(
            "grid size {size} differs from mask size {}",
            mask.size()
        )));
    }
    if size < 2 {
        return Err(Error::domain("crossing grid must be at least 2x2"));
    }
    let mut counts = CrossingCounts::default();
    for (i, a) in hs.iter().enumerate() {
        for b in &hs[i + 1..] {
            let Some([x, y]) = a.intersection(b) else {
                continue;
            };
            if !((-0.5..=0.5).contains(&x) && (-0.5..=0.5).contains(&y)) {
                continue;
            }
            if mask.get(nearest_index(x, size), nearest_index(y, size)) {
                counts.in_training += 1;
            } else {
                counts.in_generalized += 1;
            }
        }
    }
    Ok(counts)
}

/// Cross-replicate spread of sampled network functions.
#[derive(Clone, Debug, PartialEq)]
pub struct RandomnessReport {
    /// Unbiased per-pixel variance across replicates.
    pub variance: Grid,
    pub replicates: usize,
    pub mean_training: f64,
    pub mean_generalized: f64,
}

impl RandomnessReport {
    /// Flat `key = value` block.
    pub fn to_text(&self) -> String {
        let max = self.variance.values().iter().copied().fold(0.0, f64::max);
        let mut out = String::new();
        writeln!(out, "status = ok").unwrap();
        writeln!(out, "replicates = {}", self.replicates).unwrap();
        writeln!(out, "size = {}", self.variance.size()).unwrap();
        writeln!(out, "mean_variance_training = {:.16e}", self.mean_training).unwrap();
        writeln!(
            out,
            "mean_variance_generalized = {:.16e}",
            self.mean_generalized
        )
        .unwrap();
        writeln!(out, "max_variance = {max:.16e}").unwrap();
        out
    }
}

/// Per-pixel unbiased variance across `samples`, averaged separately over
/// training and generalized pixels of `mask`.
pub fn generalization_variance(samples: &[Grid], mask: &MaskImage) -> Result<RandomnessReport> {
    if samples.len() < 2 {
        return Err(Error::domain(format!(
            "variance needs at least 2 replicates, got {}",
            samples.len()
        )));
    }
    let size = mask.size();
    if let Some(bad) = samples.iter().find(|s| s.size() != size) {
        return Err(Error::domain(format!(
            "replicate grid is {0}x{0} but mask is {size}x{size}",
            bad.size()
        )));
    }
    let n = size * size;
    // Welford's running mean and sum of squared deviations.
    let mut mean = vec![0.0; n];
    let mut m2 = vec![0.0; n];
    for (k, s) in samples.iter().enumerate() {
        let count = (k + 1) as f64;
        for ((m, q), &v) in mean.iter_mut().zip(m2.iter_mut()).zip(s.values()) {
            let delta = v - *m;
            *m += delta / count;
            *q += delta * (v - *m);
        }
    }
    let denom = (samples.len() - 1) as f64;
    let variance: Vec<f64> = m2.into_iter().map(|q| (q / denom).max(0.0)).collect();

    let (mut sum_t, mut n_t, mut sum_g, mut n_g) = (0.0, 0usize, 0.0, 0usize);
    for (&v, &flag) in variance.iter().zip(mask.flags()) {
        if flag {
            sum_t += v;
            n_t += 1;
        } else {
            sum_g += v;
            n_g += 1;
        }
    }
    Ok(RandomnessReport {
        variance: Grid::new(size, variance)?,
        replicates: samples.len(),
        mean_training: sum_t / n_t as f64,
        mean_generalized: sum_g / n_g as f64,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::network::{ActivationSpec, Layer};

    fn line(w1: f64, w2: f64, b: f64) -> Hyperplane2 {
        Hyperplane2::new(w1, w2, b).unwrap()
    }

    fn first_layer(rows: &[[f64; 3]]) -> Network {
        let weights = rows.iter().flat_map(|r| [r[0], r[1]]).collect();
        let biases = rows.iter().map(|r| r[2]).collect();
        Network::new(
            2,
            vec![Layer::new(2, weights, biases, ActivationSpec::tanh()).unwrap()],
        )
        .unwrap()
    }

    #[test]
    fn extracts_lines_and_degenerate_neurons() {
        let net = first_layer(&[[1.0, 0.0, 0.0], [0.0, 0.0, 0.3], [1.0, 1.0, -1.0]]);
        let zs = first_layer_hyperplanes(&net).unwrap();
        assert_eq!(zs[0], ZeroSet::Line(line(1.0, 0.0, 0.0)));
        assert_eq!(zs[1], ZeroSet::Degenerate { bias: 0.3 });
        let diag = zs[2].line().unwrap();
        assert_eq!(diag.eval([0.5, 0.5]), 0.0);
        assert_eq!(first_layer_lines(&net).unwrap().len(), 2);
    }

    #[test]
    fn rejects_wrong_arity() {
        let layer = Layer::new(3, vec![1.0; 3], vec![0.0], ActivationSpec::tanh()).unwrap();
        let net = Network::new(3, vec![layer]).unwrap();
        assert!(matches!(
            first_layer_hyperplanes(&net),
            Err(Error::Domain(_))
        ));
    }

    #[test]
    fn degenerate_line_is_rejected() {
        assert!(Hyperplane2::new(0.0, 0.0, 1.0).is_err());
    }

    #[test]
    fn distances() {
        let vertical = line(1.0, 0.0, 0.0);
        assert_eq!(distance_to_hyperplane(&vertical, [0.25, 0.9]), 0.25);
        assert_eq!(distance_to_hyperplane(&vertical, [0.0, -0.3]), 0.0);
        let diag = line(1.0, 1.0, -1.0);
        assert!(
            (distance_to_hyperplane(&diag, [0.0, 0.0]) - std::f64::consts::FRAC_1_SQRT_2).abs()
                < 1e-15
        );
    }

    #[test]
    fn strong_region_is_closed() {
        let vertical = line(1.0, 0.0, 0.0);
        let spec = StrongRegionSpec::new(0.1).unwrap();
        assert!(in_strong_region(&vertical, [0.0, 0.4], &spec));
        assert!(!in_strong_region(&vertical, [0.2, 0.0], &spec));
        let spec = StrongRegionSpec::new(0.25).unwrap();
        assert!(in_strong_region(&vertical, [0.25, 0.0], &spec));
        assert!(in_strong_region_preactivation(
            &line(4.0, 0.0, 0.0),
            [0.25, 0.0],
            1.0
        ));
        assert!(StrongRegionSpec::new(0.0).is_err());
    }

    #[test]
    fn axis_crossing_lands_on_centre_pixel() {
        // (0, 0) rounds to pixel (32, 32) on a 64 grid: 0.5 * 63 = 31.5 -> 32
        let mut flags = vec![false; 64 * 64];
        flags[0] = true;
        let mask = MaskImage::new(64, flags.clone()).unwrap();
        let hs = [line(1.0, 0.0, 0.0), line(0.0, 1.0, 0.0)];
        let c = crossings_in_region(&hs, &mask, 64).unwrap();
        assert_eq!(
            c,
            CrossingCounts {
                in_training: 0,
                in_generalized: 1
            }
        );

        flags[32 * 64 + 32] = true;
        let mask = MaskImage::new(64, flags).unwrap();
        let c = crossings_in_region(&hs, &mask, 64).unwrap();
        assert_eq!(
            c,
            CrossingCounts {
                in_training: 1,
                in_generalized: 0
            }
        );
    }

    #[test]
    fn parallel_lines_do_not_cross() {
        let mask = MaskImage::new(8, (0..64).map(|i| i < 10).collect()).unwrap();
        let hs = [line(1.0, 0.0, -0.1), line(1.0, 0.0, -0.2)];
        assert_eq!(
            crossings_in_region(&hs, &mask, 8).unwrap(),
            CrossingCounts::default()
        );
    }

    #[test]
    fn constant_offset_variance() {
        let mask = MaskImage::new(2, vec![true, false, false, true]).unwrap();
        let a = Grid::new(2, vec![0.1; 4]).unwrap();
        let b = Grid::new(2, vec![0.3; 4]).unwrap();
        let r = generalization_variance(&[a.clone(), b], &mask).unwrap();
        for &v in r.variance.values() {
            assert!((v - 0.02).abs() < 1e-15);
        }
        let same = generalization_variance(&[a.clone(), a.clone(), a.clone()], &mask).unwrap();
        assert!(same.variance.values().iter().all(|&v| v == 0.0));
        assert_eq!(same.mean_generalized, 0.0);
    }

    #[test]
    fn variance_guards() {
        let mask = MaskImage::new(2, vec![true, false, false, true]).unwrap();
        let a = Grid::new(2, vec![0.0; 4]).unwrap();
        let big = Grid::new(3, vec![0.0; 9]).unwrap();
        assert!(generalization_variance(std::slice::from_ref(&a), &mask).is_err());
        assert!(generalization_variance(&[a, big], &mask).is_err());
    }
}
