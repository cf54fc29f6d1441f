//! Procedural line and ring datasets plus the training mask.
//!
//! All generators are pure functions of `(size, params)`. Features are drawn
//! without anti-aliasing: a pixel takes the foreground value when its centre
//! lies inside a feature and the background value otherwise.

use rand::seq::SliceRandom;
use serde::{Deserialize, Serialize};

use super::{coord, GrayImage, MaskImage};
use crate::error::{Error, Result};
use crate::rng::{stream_rng, Stream};

/// A straight band, optionally dashed along its length.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Stripe {
    /// A point on the centre line.
    pub point: [f64; 2],
    /// Direction of the centre line, degrees counter-clockwise from +x.
    pub angle_deg: f64,
    /// Half of the band width, in input units.
    pub half_width: f64,
    /// Dash period along the line, in input units.
    #[serde(default = "Stripe::default_period")]
    pub dash_period: f64,
    /// Fraction of each period that is drawn; 1 gives a solid band.
    #[serde(default = "Stripe::solid_duty")]
    pub dash_duty: f64,
}

impl Stripe {
    fn default_period() -> f64 {
        0.2
    }

    fn solid_duty() -> f64 {
        1.0
    }

    pub fn solid(point: [f64; 2], angle_deg: f64, half_width: f64) -> Self {
        Stripe {
            point,
            angle_deg,
            half_width,
            dash_period: Self::default_period(),
            dash_duty: 1.0,
        }
    }

    fn validate(&self) -> Result<()> {
        if self.half_width.is_nan() || self.half_width <= 0.0 {
            return Err(Error::domain(format!(
                "stripe half-width {} must be positive",
                self.half_width
            )));
        }
        if !(self.dash_duty > 0.0 && self.dash_duty <= 1.0) {
            return Err(Error::domain(format!(
                "dash duty {} outside (0, 1]",
                self.dash_duty
            )));
        }
        if self.dash_duty < 1.0 && (self.dash_period.is_nan() || self.dash_period <= 0.0) {
            return Err(Error::domain(format!(
                "dash period {} must be positive",
                self.dash_period
            )));
        }
        Ok(())
    }

    /// Distance from `p` to the centre line.
    pub fn distance(&self, p: [f64; 2]) -> f64 {
        let (s, c) = self.angle_deg.to_radians().sin_cos();
        let (dx, dy) = (p[0] - self.point[0], p[1] - self.point[1]);
        (dx * s - dy * c).abs()
    }

    pub fn contains(&self, p: [f64; 2]) -> bool {
        if self.distance(p) > self.half_width {
            return false;
        }
        if self.dash_duty >= 1.0 {
            return true;
        }
        let (s, c) = self.angle_deg.to_radians().sin_cos();
        let along = (p[0] - self.point[0]) * c + (p[1] - self.point[1]) * s;
        (along / self.dash_period).rem_euclid(1.0) < self.dash_duty
    }
}

/// Two straight features: a solid band and a dashed band.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ThetaLParams {
    pub solid: Stripe,
    pub dashed: Stripe,
    pub foreground: f64,
    pub background: f64,
}

impl Default for ThetaLParams {
    fn default() -> Self {
        ThetaLParams {
            solid: default_shared_stripe(),
            dashed: Stripe {
                point: [0.22, 0.0],
                angle_deg: 100.0,
                half_width: 0.045,
                dash_period: 0.18,
                dash_duty: 0.5,
            },
            foreground: 0.5,
            background: -0.5,
        }
    }
}

/// One straight band and one circular ring.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ThetaCParams {
    pub stripe: Stripe,
    pub ring_center: [f64; 2],
    pub ring_radius: f64,
    /// Full radial width of the ring.
    pub ring_thickness: f64,
    pub foreground: f64,
    pub background: f64,
}

impl Default for ThetaCParams {
    fn default() -> Self {
        ThetaCParams {
            stripe: default_shared_stripe(),
            ring_center: [0.0, 0.0],
            ring_radius: 0.3,
            ring_thickness: 0.09,
            foreground: 0.5,
            background: -0.5,
        }
    }
}

fn default_shared_stripe() -> Stripe {
    Stripe::solid([0.0, 0.05], 25.0, 0.045)
}

fn check_levels(foreground: f64, background: f64) -> Result<()> {
    for v in [foreground, background] {
        if !(-0.5..=0.5).contains(&v) {
            return Err(Error::domain(format!("level {v} outside [-0.5, 0.5]")));
        }
    }
    Ok(())
}

fn render(size: usize, inside: impl Fn([f64; 2]) -> bool, fg: f64, bg: f64) -> Result<GrayImage> {
    let mut values = Vec::with_capacity(size * size);
    for iy in 0..size {
        for ix in 0..size {
            let p = [coord(ix, size), coord(iy, size)];
            values.push(if inside(p) { fg } else { bg });
        }
    }
    GrayImage::new(size, values)
}

fn check_size(size: usize) -> Result<()> {
    if size < 8 {
        return Err(Error::domain(format!("generator size {size} is below 8")));
    }
    Ok(())
}

pub fn generate_theta_l(size: usize, params: &ThetaLParams) -> Result<GrayImage> {
    check_size(size)?;
    params.solid.validate()?;
    params.dashed.validate()?;
    check_levels(params.foreground, params.background)?;
    render(
        size,
        |p| params.solid.contains(p) || params.dashed.contains(p),
        params.foreground,
        params.background,
    )
}

pub fn generate_theta_c(size: usize, params: &ThetaCParams) -> Result<GrayImage> {
    check_size(size)?;
    params.stripe.validate()?;
    check_levels(params.foreground, params.background)?;
    if !(params.ring_radius > 0.0 && params.ring_thickness > 0.0) {
        return Err(Error::domain("ring radius and thickness must be positive"));
    }
    if params.ring_radius + params.ring_thickness > 0.5 {
        return Err(Error::domain(format!(
            "ring radius {} plus thickness {} exceeds the half-extent 0.5",
            params.ring_radius, params.ring_thickness
        )));
    }
    let [cx, cy] = params.ring_center;
    let half = params.ring_thickness / 2.0;
    render(
        size,
        |p| {
            let r = (p[0] - cx).hypot(p[1] - cy);
            params.stripe.contains(p) || (r - params.ring_radius).abs() <= half
        },
        params.foreground,
        params.background,
    )
}

/// Training-mask layout: a seeded random scatter of training pixels outside
/// an axis-aligned excluded block.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MaskParams {
    /// Fraction of the whole image that becomes training pixels.
    pub coverage: f64,
    /// Lower-left corner of the excluded block.
    pub block_min: [f64; 2],
    /// Upper-right corner of the excluded block.
    pub block_max: [f64; 2],
    pub seed: u64,
}

impl Default for MaskParams {
    fn default() -> Self {
        MaskParams {
            coverage: 0.5,
            block_min: [0.05, -0.2],
            block_max: [0.45, 0.3],
            seed: 5,
        }
    }
}

impl MaskParams {
    pub fn in_block(&self, p: [f64; 2]) -> bool {
        (self.block_min[0]..=self.block_max[0]).contains(&p[0])
            && (self.block_min[1]..=self.block_max[1]).contains(&p[1])
    }
}

pub fn generate_mask(size: usize, params: &MaskParams) -> Result<MaskImage> {
    check_size(size)?;
    if !(params.coverage > 0.0 && params.coverage < 1.0) {
        return Err(Error::domain(format!(
            "mask coverage {} outside (0, 1)",
            params.coverage
        )));
    }
    let mut eligible = Vec::new();
    for iy in 0..size {
        for ix in 0..size {
            if !params.in_block([coord(ix, size), coord(iy, size)]) {
                eligible.push(iy * size + ix);
            }
        }
    }
    let wanted = (params.coverage * (size * size) as f64).round() as usize;
    if wanted == 0 || wanted > eligible.len() {
        return Err(Error::domain(format!(
            "coverage {} asks for {wanted} training pixels but {} lie outside the block",
            params.coverage,
            eligible.len()
        )));
    }
    let mut rng = stream_rng(params.seed, Stream::Mask);
    eligible.shuffle(&mut rng);
    let mut flags = vec![false; size * size];
    for &i in &eligible[..wanted] {
        flags[i] = true;
    }
    MaskImage::new(size, flags)
}
