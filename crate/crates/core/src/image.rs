//! Grayscale images and PGM (P2/P5, 8- and 16-bit) input/output.

use crate::error::{Error, Result};
use std::fmt::Write as _;

/// Row-major grayscale pixels as reals.
#[derive(Clone, Debug, PartialEq)]
pub struct ImageBuffer {
    width: usize,
    height: usize,
    pixels: Vec<f64>,
}

impl ImageBuffer {
    pub fn new(width: usize, height: usize, pixels: Vec<f64>) -> Result<Self> {
        if width == 0 || height == 0 || width * height != pixels.len() {
            return Err(Error::ShapeMismatch(format!(
                "{width}x{height} image with {} pixels",
                pixels.len()
            )));
        }
        Ok(ImageBuffer {
            width,
            height,
            pixels,
        })
    }

    pub fn zeros(width: usize, height: usize) -> Result<Self> {
        Self::new(width, height, vec![0.0; width * height])
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn pixels(&self) -> &[f64] {
        &self.pixels
    }

    pub fn into_pixels(self) -> Vec<f64> {
        self.pixels
    }

    pub fn get(&self, x: usize, y: usize) -> f64 {
        self.pixels[y * self.width + x]
    }

    pub fn set(&mut self, x: usize, y: usize, v: f64) {
        self.pixels[y * self.width + x] = v;
    }

    pub fn row(&self, y: usize) -> &[f64] {
        &self.pixels[y * self.width..(y + 1) * self.width]
    }

    pub fn max_abs_diff(&self, other: &ImageBuffer) -> f64 {
        self.pixels
            .iter()
            .zip(&other.pixels)
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum PgmEncoding {
    Plain,
    Binary,
}

/// A decoded PGM file.
#[derive(Clone, Debug, PartialEq)]
pub struct Pgm {
    pub image: ImageBuffer,
    pub maxval: u16,
    pub encoding: PgmEncoding,
}

struct Tokens<'a> {
    data: &'a [u8],
    pos: usize,
}

impl<'a> Tokens<'a> {
    fn skip_space(&mut self) {
        while self.pos < self.data.len() {
            match self.data[self.pos] {
                b'#' => {
                    while self.pos < self.data.len() && self.data[self.pos] != b'\n' {
                        self.pos += 1;
                    }
                }
                c if c.is_ascii_whitespace() => self.pos += 1,
                _ => break,
            }
        }
    }

    fn word(&mut self, field: &str) -> Result<&'a str> {
        self.skip_space();
        let start = self.pos;
        while self.pos < self.data.len() && !self.data[self.pos].is_ascii_whitespace() {
            self.pos += 1;
        }
        if start == self.pos {
            return Err(Error::parse(field, "unexpected end of file"));
        }
        std::str::from_utf8(&self.data[start..self.pos]).map_err(|_| Error::parse(field, "not ASCII"))
    }

    fn number(&mut self, field: &str) -> Result<u32> {
        let w = self.word(field)?;
        w.parse()
            .map_err(|_| Error::parse(field, format!("expected an unsigned integer, got {w:?}")))
    }
}

/// Decodes a P2 or P5 file.
pub fn parse_pgm(data: &[u8]) -> Result<Pgm> {
    let mut t = Tokens { data, pos: 0 };
    let encoding = match t.word("magic")? {
        "P2" => PgmEncoding::Plain,
        "P5" => PgmEncoding::Binary,
        other => return Err(Error::parse("magic", format!("expected P2 or P5, got {other:?}"))),
    };
    let width = t.number("width")? as usize;
    let height = t.number("height")? as usize;
    let maxval = t.number("maxval")?;
    if maxval == 0 || maxval > 65535 {
        return Err(Error::parse("maxval", format!("{maxval} outside 1..=65535")));
    }
    let count = width * height;
    let mut pixels = Vec::with_capacity(count);
    match encoding {
        PgmEncoding::Plain => {
            for _ in 0..count {
                let v = t.number("pixel")?;
                if v > maxval {
                    return Err(Error::parse("pixel", format!("{v} exceeds maxval {maxval}")));
                }
                pixels.push(v as f64);
            }
        }
        PgmEncoding::Binary => {
            // Exactly one whitespace byte separates the header from the raster.
            let start = t.pos + 1;
            let bytes = if maxval < 256 { 1 } else { 2 };
            let raster = data
                .get(start..start + count * bytes)
                .ok_or_else(|| Error::parse("pixel", "raster shorter than width*height"))?;
            pixels.extend(raster.chunks(bytes).map(|c| match c {
                [b] => *b as f64,
                [hi, lo] => u16::from_be_bytes([*hi, *lo]) as f64,
                _ => unreachable!(),
            }));
        }
    }
    Ok(Pgm {
        image: ImageBuffer::new(width, height, pixels)?,
        maxval: maxval as u16,
        encoding,
    })
}

/// Encodes an image, rounding and clamping pixels to `0..=maxval`.
pub fn encode_pgm(image: &ImageBuffer, maxval: u16, encoding: PgmEncoding) -> Vec<u8> {
    let maxval = maxval.max(1);
    let quantize = |v: f64| -> u16 {
        if v.is_nan() {
            0
        } else {
            v.round().clamp(0.0, maxval as f64) as u16
        }
    };
    let mut header = String::new();
    let magic = match encoding {
        PgmEncoding::Plain => "P2",
        PgmEncoding::Binary => "P5",
    };
    let _ = write!(header, "{magic}\n{} {}\n{maxval}\n", image.width, image.height);
    let mut out = header.into_bytes();
    match encoding {
        PgmEncoding::Plain => {
            for y in 0..image.height {
                let line: Vec<String> = image.row(y).iter().map(|&v| quantize(v).to_string()).collect();
                out.extend_from_slice(line.join(" ").as_bytes());
                out.push(b'\n');
            }
        }
        PgmEncoding::Binary => {
            for &v in &image.pixels {
                let q = quantize(v);
                if maxval < 256 {
                    out.push(q as u8);
                } else {
                    out.extend_from_slice(&q.to_be_bytes());
                }
            }
        }
    }
    out
}
