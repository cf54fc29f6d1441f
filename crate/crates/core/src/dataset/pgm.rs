//! Binary PGM (`P5`) codec for square 8-bit images.
//!
//! The writer emits the canonical form `P5\n<w> <h>\n255\n<payload>` with no
//! comments. The reader also accepts `#` comments and arbitrary whitespace
//! between header fields. Files store the top row first; in memory row 0 is
//! the bottom row.

use super::{brightness_to_value, value_to_brightness, GrayImage};

#[derive(Clone, Debug, PartialEq, Eq, thiserror::Error)]
pub enum PgmError {
    #[error("bad magic number, expected \"P5\"")]
    BadMagic,
    #[error("header ended before the {0} field")]
    MissingField(&'static str),
    #[error("invalid {field} field {text:?}")]
    InvalidNumber { field: &'static str, text: String },
    #[error("zero image dimension")]
    ZeroDimension,
    #[error("image is {width}x{height}, only square images are supported")]
    NotSquare { width: usize, height: usize },
    #[error("maxval {0} is not supported, expected 255")]
    UnsupportedMaxval(u64),
    #[error("missing whitespace between maxval and pixel data")]
    MissingSeparator,
    #[error("truncated payload: expected {expected} bytes, found {found}")]
    Truncated { expected: usize, found: usize },
    #[error("{0} unexpected bytes after pixel data")]
    TrailingBytes(usize),
}

struct Header<'a> {
    bytes: &'a [u8],
    pos: usize,
}

impl<'a> Header<'a> {
    fn skip_space_and_comments(&mut self) {
        while let Some(&c) = self.bytes.get(self.pos) {
            if c == b'#' {
                while let Some(&c) = self.bytes.get(self.pos) {
                    self.pos += 1;
                    if c == b'\n' || c == b'\r' {
                        break;
                    }
                }
            } else if c.is_ascii_whitespace() {
                self.pos += 1;
            } else {
                break;
            }
        }
    }

    fn number(&mut self, field: &'static str) -> Result<u64, PgmError> {
        self.skip_space_and_comments();
        let start = self.pos;
        while self
            .bytes
            .get(self.pos)
            .is_some_and(|c| !c.is_ascii_whitespace() && *c != b'#')
        {
            self.pos += 1;
        }
        if start == self.pos {
            return Err(PgmError::MissingField(field));
        }
        let text = String::from_utf8_lossy(&self.bytes[start..self.pos]).into_owned();
        if !text.bytes().all(|c| c.is_ascii_digit()) {
            return Err(PgmError::InvalidNumber { field, text });
        }
        text.parse()
            .map_err(|_| PgmError::InvalidNumber { field, text })
    }
}

pub fn load_pgm(bytes: &[u8]) -> Result<GrayImage, PgmError> {
    if bytes.len() < 2 || &bytes[..2] != b"P5" {
        return Err(PgmError::BadMagic);
    }
    let mut header = Header { bytes, pos: 2 };
    // The magic must be followed by whitespace or a comment.
    if !header
        .bytes
        .get(2)
        .is_some_and(|c| c.is_ascii_whitespace() || *c == b'#')
    {
        return Err(PgmError::BadMagic);
    }
    let width = header.number("width")?;
    let height = header.number("height")?;
    let maxval = header.number("maxval")?;
    if width == 0 || height == 0 {
        return Err(PgmError::ZeroDimension);
    }
    let (width, height) = (width as usize, height as usize);
    if width != height {
        return Err(PgmError::NotSquare { width, height });
    }
    if maxval != 255 {
        return Err(PgmError::UnsupportedMaxval(maxval));
    }
    match bytes.get(header.pos) {
        Some(c) if c.is_ascii_whitespace() => {}
        _ => return Err(PgmError::MissingSeparator),
    }
    let payload = &bytes[header.pos + 1..];
    let expected = width.checked_mul(height).ok_or(PgmError::Truncated {
        expected: usize::MAX,
        found: payload.len(),
    })?;
    if payload.len() < expected {
        return Err(PgmError::Truncated {
            expected,
            found: payload.len(),
        });
    }
    if payload.len() > expected {
        return Err(PgmError::TrailingBytes(payload.len() - expected));
    }

    let size = width;
    let mut values = Vec::with_capacity(expected);
    for row in payload.chunks_exact(size).rev() {
        values.extend(row.iter().map(|&b| brightness_to_value(b)));
    }
    Ok(GrayImage::new(size, values).expect("decoded bytes are always in range"))
}

pub fn save_pgm(img: &GrayImage) -> Vec<u8> {
    let size = img.size();
    let mut out = format!("P5\n{size} {size}\n255\n").into_bytes();
    out.reserve(size * size);
    for row in img.values().chunks_exact(size).rev() {
        out.extend(row.iter().map(|&v| value_to_brightness(v)));
    }
    out
}
