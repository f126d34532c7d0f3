//! Binary Netpbm codecs: PGM `P5` and PPM `P6` with maxval 255.
//!
//! The header is `magic`, width, height and maxval separated by whitespace,
//! followed by exactly one whitespace byte and the raw samples. Comments are
//! not supported.

use std::fs;
use std::path::Path;

use crate::error::{Error, Result};
use crate::grid::{GridShape, ImageGrid, MaskGrid};
use crate::scalar::Real;

/// Decoded Netpbm raster: samples are interleaved per pixel.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Pnm {
    pub shape: GridShape,
    pub channels: usize,
    pub samples: Vec<u8>,
}

struct Cursor<'a> {
    bytes: &'a [u8],
    pos: usize,
}

impl<'a> Cursor<'a> {
    fn skip_whitespace(&mut self) -> Result<()> {
        let start = self.pos;
        while self.pos < self.bytes.len() && self.bytes[self.pos].is_ascii_whitespace() {
            self.pos += 1;
        }
        if self.pos == start {
            return Err(Error::format(self.pos, "expected whitespace in header"));
        }
        Ok(())
    }

    fn number(&mut self, what: &str) -> Result<usize> {
        let start = self.pos;
        while self.pos < self.bytes.len() && self.bytes[self.pos].is_ascii_digit() {
            self.pos += 1;
        }
        if self.pos == start {
            return Err(Error::format(start, format!("expected {what}")));
        }
        std::str::from_utf8(&self.bytes[start..self.pos])
            .ok()
            .and_then(|s| s.parse().ok())
            .ok_or_else(|| Error::format(start, format!("{what} out of range")))
    }
}

pub fn decode_pnm(bytes: &[u8]) -> Result<Pnm> {
    if bytes.len() < 2 {
        return Err(Error::format(0, "truncated header"));
    }
    let channels = match &bytes[..2] {
        b"P5" => 1,
        b"P6" => 3,
        _ => return Err(Error::format(0, "unsupported magic")),
    };
    let mut cur = Cursor { bytes, pos: 2 };
    cur.skip_whitespace()?;
    let width = cur.number("width")?;
    cur.skip_whitespace()?;
    let height = cur.number("height")?;
    cur.skip_whitespace()?;
    let maxval_at = cur.pos;
    let maxval = cur.number("maxval")?;
    if maxval != 255 {
        return Err(Error::format(maxval_at, format!("unsupported maxval {maxval}")));
    }
    if cur.pos >= bytes.len() || !bytes[cur.pos].is_ascii_whitespace() {
        return Err(Error::format(cur.pos, "expected single whitespace after maxval"));
    }
    let start = cur.pos + 1;
    let shape = GridShape::new(height, width).map_err(|_| Error::format(2, "zero-sized raster"))?;
    let need = shape.len() * channels;
    if bytes.len() - start < need {
        return Err(Error::format(
            bytes.len(),
            format!("truncated payload: {} of {} bytes", bytes.len() - start, need),
        ));
    }
    Ok(Pnm { shape, channels, samples: bytes[start..start + need].to_vec() })
}

pub fn encode_pnm(pnm: &Pnm) -> Result<Vec<u8>> {
    let magic = match pnm.channels {
        1 => "P5",
        3 => "P6",
        n => return Err(Error::Validation(format!("cannot encode {n}-channel raster as PNM"))),
    };
    let mut out = format!("{magic}\n{} {}\n255\n", pnm.shape.width(), pnm.shape.height()).into_bytes();
    out.extend_from_slice(&pnm.samples);
    Ok(out)
}

fn read_bytes(path: &Path) -> Result<Vec<u8>> {
    fs::read(path).map_err(|e| Error::io(path, e))
}

fn write_bytes(path: &Path, bytes: &[u8]) -> Result<()> {
    fs::write(path, bytes).map_err(|e| Error::io(path, e))
}

/// Samples `>= 128` become foreground.
pub fn decode_mask(bytes: &[u8]) -> Result<MaskGrid> {
    let pnm = decode_pnm(bytes)?;
    if pnm.channels != 1 {
        return Err(Error::format(0, "unsupported magic"));
    }
    MaskGrid::new(pnm.shape, pnm.samples.iter().map(|&b| u8::from(b >= 128)).collect())
}

pub fn encode_mask(mask: &MaskGrid) -> Vec<u8> {
    let pnm = Pnm { shape: mask.shape(), channels: 1, samples: mask.labels().iter().map(|&l| l * 255).collect() };
    encode_pnm(&pnm).expect("single channel is encodable")
}

pub fn read_mask(path: impl AsRef<Path>) -> Result<MaskGrid> {
    decode_mask(&read_bytes(path.as_ref())?)
}

pub fn write_mask(mask: &MaskGrid, path: impl AsRef<Path>) -> Result<()> {
    write_bytes(path.as_ref(), &encode_mask(mask))
}

/// Quantizes a sample from `[0, 1]` to a byte.
#[inline]
pub fn quantize<T: Real>(v: T) -> u8 {
    let v = v.as_f64().clamp(0.0, 1.0);
    (v * 255.0).round() as u8
}

pub fn decode_image<T: Real>(bytes: &[u8]) -> Result<ImageGrid<T>> {
    let pnm = decode_pnm(bytes)?;
    image_from_pnm(&pnm)
}

pub fn image_from_pnm<T: Real>(pnm: &Pnm) -> Result<ImageGrid<T>> {
    let n = pnm.shape.len();
    let mut data = vec![T::zero(); n * pnm.channels];
    let scale = T::of(255.0);
    for (i, px) in pnm.samples.chunks_exact(pnm.channels).enumerate() {
        for (c, &b) in px.iter().enumerate() {
            data[c * n + i] = T::of(b as f64) / scale;
        }
    }
    ImageGrid::new(pnm.shape, pnm.channels, data)
}

pub fn image_to_pnm<T: Real>(img: &ImageGrid<T>) -> Pnm {
    let n = img.shape().len();
    let ch = img.channels();
    let mut samples = vec![0u8; n * ch];
    for c in 0..ch {
        for (i, &v) in img.channel(c).iter().enumerate() {
            samples[i * ch + c] = quantize(v);
        }
    }
    Pnm { shape: img.shape(), channels: ch, samples }
}

pub fn encode_image<T: Real>(img: &ImageGrid<T>) -> Result<Vec<u8>> {
    encode_pnm(&image_to_pnm(img))
}

/// Reads a `P6` file as three channels or a `P5` file as one, scaled by 1/255.
pub fn read_image<T: Real>(path: impl AsRef<Path>) -> Result<ImageGrid<T>> {
    decode_image(&read_bytes(path.as_ref())?)
}

pub fn write_image<T: Real>(img: &ImageGrid<T>, path: impl AsRef<Path>) -> Result<()> {
    write_bytes(path.as_ref(), &encode_image(img)?)
}
