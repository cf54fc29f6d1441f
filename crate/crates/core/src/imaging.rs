//! Rasterised views of a trained network.
//!
//! [`sample_generalization`] evaluates the network on the dataset pixel grid.
//! [`render_hyperplane_diagram`] draws the zero lines of the first hidden
//! layer as translucent dark strokes over a window slightly larger than the
//! data square, with the data square itself outlined by a dotted rectangle.

use serde::{Deserialize, Serialize};

use crate::dataset::{coord, GrayImage, Grid};
use crate::error::{Error, Result};
use crate::geometry::Hyperplane2;
use crate::network::{ForwardTrace, Network};

/// Half extent of the diagram window: the data square plus a 50% margin.
pub const VIEW_HALF_EXTENT: f64 = 0.75;

/// Raw network outputs at every pixel of a `size`-wide grid (row 0 at the bottom).
pub fn sample_raw(net: &Network, size: usize) -> Result<Grid> {
    if net.input_arity() != 2 {
        return Err(Error::domain(format!(
            "sampling needs a 2-input network, got {} inputs",
            net.input_arity()
        )));
    }
    if size < 2 {
        return Err(Error::domain("sample grid must be at least 2x2"));
    }
    let mut trace = ForwardTrace::for_network(net);
    let mut values = Vec::with_capacity(size * size);
    for iy in 0..size {
        for ix in 0..size {
            net.forward_into(&[coord(ix, size), coord(iy, size)], &mut trace)?;
            values.push(trace.output()[0]);
        }
    }
    Grid::new(size, values)
}

/// [`sample_raw`] clamped into the displayable range `[-0.5, 0.5]`.
pub fn sample_generalization(net: &Network, size: usize) -> Result<GrayImage> {
    let raw = sample_raw(net, size)?;
    GrayImage::from_clamped(size, raw.values().iter().copied())
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct DiagramStyle {
    /// Darkening applied by a fully covered pixel of one line.
    pub line_opacity: f64,
    /// Canvas value before any line is drawn.
    pub background_value: f64,
    /// Length of the dashes and the gaps of the data-square outline, in pixels.
    pub rectangle_dash_period: usize,
    /// Subsamples per pixel side used to estimate line coverage.
    pub supersample_factor: usize,
    /// Stroke width in pixels.
    pub line_width_px: f64,
}

impl Default for DiagramStyle {
    fn default() -> Self {
        DiagramStyle {
            line_opacity: 0.35,
            background_value: 0.5,
            rectangle_dash_period: 4,
            supersample_factor: 4,
            line_width_px: 1.0,
        }
    }
}

impl DiagramStyle {
    pub fn validate(&self) -> Result<()> {
        if !(self.line_opacity > 0.0 && self.line_opacity <= 1.0) {
            return Err(Error::domain(format!(
                "line opacity {} outside (0, 1]",
                self.line_opacity
            )));
        }
        if !(-0.5..=0.5).contains(&self.background_value) {
            return Err(Error::domain("diagram background outside [-0.5, 0.5]"));
        }
        if self.rectangle_dash_period == 0 || self.supersample_factor == 0 {
            return Err(Error::domain(
                "dash period and supersample factor must be positive",
            ));
        }
        if !(self.line_width_px > 0.0 && self.line_width_px.is_finite()) {
            return Err(Error::domain("line width must be positive"));
        }
        Ok(())
    }
}

/// Pixel index along one axis of the window containing coordinate `c`.
fn window_index(c: f64, size: usize) -> usize {
    let t = ((c + VIEW_HALF_EXTENT) / (2.0 * VIEW_HALF_EXTENT) * size as f64).floor();
    t.clamp(0.0, (size - 1) as f64) as usize
}

/// Draws the zero lines over the window `[-0.75, 0.75]^2`.
///
/// Each line multiplies the brightness (taken in `[0, 1]`) of the pixels it
/// covers by `1 - opacity * coverage`, so crossings and bundles of nearby
/// lines show up darker. Lines are composed in a canonical order, making the
/// result independent of the order of `hs`.
pub fn render_hyperplane_diagram(
    hs: &[Hyperplane2],
    size: usize,
    style: &DiagramStyle,
) -> Result<GrayImage> {
    style.validate()?;
    if size < 2 {
        return Err(Error::domain("diagram must be at least 2x2"));
    }
    let mut lines: Vec<(f64, f64, f64)> = hs.iter().map(Hyperplane2::coefficients).collect();
    lines.sort_by(|a, b| {
        a.0.total_cmp(&b.0)
            .then(a.1.total_cmp(&b.1))
            .then(a.2.total_cmp(&b.2))
    });

    let pixel = 2.0 * VIEW_HALF_EXTENT / size as f64;
    let half_stroke = style.line_width_px * pixel / 2.0;
    let ss = style.supersample_factor;
    let samples = (ss * ss) as f64;
    let mut brightness = vec![style.background_value + 0.5; size * size];

    for &(w1, w2, b) in &lines {
        let norm = w1.hypot(w2);
        for iy in 0..size {
            for ix in 0..size {
                let mut hits = 0usize;
                for sy in 0..ss {
                    let y = -VIEW_HALF_EXTENT + pixel * (iy as f64 + (sy as f64 + 0.5) / ss as f64);
                    for sx in 0..ss {
                        let x =
                            -VIEW_HALF_EXTENT + pixel * (ix as f64 + (sx as f64 + 0.5) / ss as f64);
                        if (w1 * x + w2 * y + b).abs() / norm <= half_stroke {
                            hits += 1;
                        }
                    }
                }
                if hits > 0 {
                    brightness[iy * size + ix] *= 1.0 - style.line_opacity * hits as f64 / samples;
                }
            }
        }
    }

    // dotted outline of the data square
    let lo = window_index(-0.5, size);
    let hi = window_index(0.5, size);
    let period = style.rectangle_dash_period;
    for t in lo..=hi {
        if ((t - lo) / period).is_multiple_of(2) {
            for (ix, iy) in [(t, lo), (t, hi), (lo, t), (hi, t)] {
                brightness[iy * size + ix] = 0.0;
            }
        }
    }

    GrayImage::from_clamped(size, brightness.into_iter().map(|v| v - 0.5))
}

/// Pixel range `lo..=hi` occupied by the data-square outline on a `size` canvas.
pub fn data_square_pixels(size: usize) -> (usize, usize) {
    (window_index(-0.5, size), window_index(0.5, size))
}
