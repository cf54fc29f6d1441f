//! Image-defined regression sets.
//!
//! A dataset is a square grayscale image: pixel coordinates are the two
//! network inputs and brightness is the target. Row 0 of every in-memory
//! grid is the *bottom* row, so pixel `(0, 0)` sits at input `(-0.5, -0.5)`
//! and pixel `(size-1, size-1)` at `(0.5, 0.5)`. The PGM codec flips rows on
//! the way in and out.

pub mod generate;
pub mod pgm;

use crate::error::{Error, Result};

pub use generate::{
    generate_mask, generate_theta_c, generate_theta_l, MaskParams, Stripe, ThetaCParams,
    ThetaLParams,
};
pub use pgm::{load_pgm, save_pgm, PgmError};

/// Smallest and largest representable pixel value.
pub const VALUE_MIN: f64 = -0.5;
pub const VALUE_MAX: f64 = 0.5;

/// Input coordinates of pixel `(ix, iy)` on a `size`-wide grid.
///
/// Corner pixels map exactly onto `±0.5`.
pub fn pixel_to_coords(ix: usize, iy: usize, size: usize) -> Result<(f64, f64)> {
    if size < 2 {
        return Err(Error::domain(format!("grid size {size} is below 2")));
    }
    if ix >= size || iy >= size {
        return Err(Error::domain(format!(
            "pixel ({ix}, {iy}) outside {size}x{size} grid"
        )));
    }
    Ok((coord(ix, size), coord(iy, size)))
}

#[inline]
pub(crate) fn coord(i: usize, size: usize) -> f64 {
    i as f64 / (size - 1) as f64 - 0.5
}

/// Nearest pixel index for a coordinate in `[-0.5, 0.5]`, clamped to the grid.
pub(crate) fn nearest_index(c: f64, size: usize) -> usize {
    let t = ((c + 0.5) * (size - 1) as f64).round();
    t.clamp(0.0, (size - 1) as f64) as usize
}

pub fn brightness_to_value(b: u8) -> f64 {
    f64::from(b) / 255.0 - 0.5
}

/// Quantize a value to a byte, clamping to `[-0.5, 0.5]` and rounding half up.
///
/// NaN maps to the mid-gray byte 128.
pub fn value_to_brightness(v: f64) -> u8 {
    if v.is_nan() {
        return 128;
    }
    let scaled = (v.clamp(VALUE_MIN, VALUE_MAX) + 0.5) * 255.0;
    (scaled + 0.5).floor() as u8
}

/// A square grid of values in `[-0.5, 0.5]`, row-major, bottom row first.
#[derive(Clone, Debug, PartialEq)]
pub struct GrayImage {
    size: usize,
    values: Vec<f64>,
}

impl GrayImage {
    pub fn new(size: usize, values: Vec<f64>) -> Result<Self> {
        if size == 0 {
            return Err(Error::domain("image size must be positive"));
        }
        if values.len() != size * size {
            return Err(Error::domain(format!(
                "{} values for a {size}x{size} image",
                values.len()
            )));
        }
        if let Some(bad) = values
            .iter()
            .find(|v| !(VALUE_MIN..=VALUE_MAX).contains(*v))
        {
            return Err(Error::domain(format!(
                "pixel value {bad} outside [-0.5, 0.5]"
            )));
        }
        Ok(GrayImage { size, values })
    }

    pub fn filled(size: usize, value: f64) -> Result<Self> {
        Self::new(size, vec![value; size * size])
    }

    /// Builds an image from arbitrary reals, clamping each into range.
    pub fn from_clamped(size: usize, values: impl IntoIterator<Item = f64>) -> Result<Self> {
        let values = values
            .into_iter()
            .map(|v| {
                if v.is_nan() {
                    0.0
                } else {
                    v.clamp(VALUE_MIN, VALUE_MAX)
                }
            })
            .collect();
        Self::new(size, values)
    }

    pub fn size(&self) -> usize {
        self.size
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    /// Value at column `ix`, row `iy` (row 0 at the bottom).
    pub fn get(&self, ix: usize, iy: usize) -> f64 {
        self.values[iy * self.size + ix]
    }

    pub fn to_grid(&self) -> Grid {
        Grid {
            size: self.size,
            values: self.values.clone(),
        }
    }
}

/// A square grid of unconstrained reals: raw network outputs and variances.
#[derive(Clone, Debug, PartialEq)]
pub struct Grid {
    size: usize,
    values: Vec<f64>,
}

impl Grid {
    pub fn new(size: usize, values: Vec<f64>) -> Result<Self> {
        if size == 0 || values.len() != size * size {
            return Err(Error::domain(format!(
                "{} values for a {size}x{size} grid",
                values.len()
            )));
        }
        Ok(Grid { size, values })
    }

    pub fn size(&self) -> usize {
        self.size
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn get(&self, ix: usize, iy: usize) -> f64 {
        self.values[iy * self.size + ix]
    }

    /// Plain-text matrix, one grid row per line (bottom row first), values
    /// written with 17 significant digits.
    pub fn to_text(&self) -> String {
        let mut out = String::with_capacity(self.values.len() * 25);
        for row in self.values.chunks(self.size) {
            let line: Vec<String> = row.iter().map(|v| format!("{v:.16e}")).collect();
            out.push_str(&line.join(" "));
            out.push('\n');
        }
        out
    }

    pub fn from_text(text: &str) -> Result<Self> {
        let mut values = Vec::new();
        let mut rows = 0;
        let mut width = None;
        for line in text.lines().filter(|l| !l.trim().is_empty()) {
            let before = values.len();
            for tok in line.split_whitespace() {
                let v: f64 = tok
                    .parse()
                    .map_err(|_| Error::format("grid matrix", format!("bad number {tok:?}")))?;
                values.push(v);
            }
            let w = values.len() - before;
            if *width.get_or_insert(w) != w {
                return Err(Error::format(
                    "grid matrix",
                    format!("row {rows} has {w} columns"),
                ));
            }
            rows += 1;
        }
        if width != Some(rows) {
            return Err(Error::format("grid matrix", "matrix is not square"));
        }
        Grid::new(rows, values)
    }
}

/// Training-subset selector: `true` marks a training pixel.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MaskImage {
    size: usize,
    flags: Vec<bool>,
}

impl MaskImage {
    /// Fails unless both the training and the generalized class are non-empty.
    pub fn new(size: usize, flags: Vec<bool>) -> Result<Self> {
        if size == 0 || flags.len() != size * size {
            return Err(Error::domain(format!(
                "{} flags for a {size}x{size} mask",
                flags.len()
            )));
        }
        if !flags.iter().any(|&f| f) {
            return Err(Error::domain("mask selects no training pixels"));
        }
        if flags.iter().all(|&f| f) {
            return Err(Error::domain("mask leaves no generalized pixels"));
        }
        Ok(MaskImage { size, flags })
    }

    /// Black pixels (value below zero) select the training subset.
    pub fn from_gray(img: &GrayImage) -> Result<Self> {
        Self::new(img.size(), img.values().iter().map(|&v| v < 0.0).collect())
    }

    pub fn to_gray(&self) -> GrayImage {
        let values = self
            .flags
            .iter()
            .map(|&f| if f { VALUE_MIN } else { VALUE_MAX })
            .collect();
        GrayImage {
            size: self.size,
            values,
        }
    }

    pub fn size(&self) -> usize {
        self.size
    }

    pub fn flags(&self) -> &[bool] {
        &self.flags
    }

    pub fn get(&self, ix: usize, iy: usize) -> bool {
        self.flags[iy * self.size + ix]
    }

    pub fn training_count(&self) -> usize {
        self.flags.iter().filter(|&&f| f).count()
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Observation {
    pub input: [f64; 2],
    pub target: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Dataset {
    pub training: Vec<Observation>,
    pub generalized: Vec<Observation>,
    pub source_size: usize,
}

/// Turns every pixel into an observation and splits them by the mask.
pub fn build_dataset(img: &GrayImage, mask: &MaskImage) -> Result<Dataset> {
    let size = img.size();
    if size != mask.size() {
        return Err(Error::domain(format!(
            "image is {size}x{size} but mask is {0}x{0}",
            mask.size()
        )));
    }
    if size < 2 {
        return Err(Error::domain("dataset image must be at least 2x2"));
    }
    let mut training = Vec::with_capacity(mask.training_count());
    let mut generalized = Vec::with_capacity(size * size - mask.training_count());
    for iy in 0..size {
        for ix in 0..size {
            let obs = Observation {
                input: [coord(ix, size), coord(iy, size)],
                target: img.get(ix, iy),
            };
            if mask.get(ix, iy) {
                training.push(obs);
            } else {
                generalized.push(obs);
            }
        }
    }
    Ok(Dataset {
        training,
        generalized,
        source_size: size,
    })
}
