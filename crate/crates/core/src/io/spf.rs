//! `SPF1` probability-map format.
//!
//! ```text
//! SPF1\n
//! <height> <width>\n
//! height*width little-endian IEEE-754 binary32 values, row-major
//! ```

use std::fs;
use std::path::Path;

use crate::error::{Error, Result};
use crate::grid::{GridShape, ProbMap};
use crate::scalar::Real;

const MAGIC: &[u8] = b"SPF1\n";

pub fn encode_probmap<T: Real>(pm: &ProbMap<T>) -> Vec<u8> {
    let shape = pm.shape();
    let mut out = MAGIC.to_vec();
    out.extend_from_slice(format!("{} {}\n", shape.height(), shape.width()).as_bytes());
    out.reserve(4 * shape.len());
    for &v in pm.probs() {
        out.extend_from_slice(&(v.as_f64() as f32).to_le_bytes());
    }
    out
}

pub fn decode_probmap<T: Real>(bytes: &[u8]) -> Result<ProbMap<T>> {
    if !bytes.starts_with(MAGIC) {
        return Err(Error::format(0, "bad magic, expected SPF1"));
    }
    let dims_at = MAGIC.len();
    let eol = bytes[dims_at..]
        .iter()
        .position(|&b| b == b'\n')
        .ok_or_else(|| Error::format(dims_at, "missing dimension line"))?;
    let line = std::str::from_utf8(&bytes[dims_at..dims_at + eol])
        .map_err(|_| Error::format(dims_at, "dimension line is not ASCII"))?;
    let mut parts = line.split(' ');
    let mut dim = |what: &str| -> Result<usize> {
        parts.next().and_then(|s| s.parse().ok()).ok_or_else(|| Error::format(dims_at, format!("bad {what}")))
    };
    let height = dim("height")?;
    let width = dim("width")?;
    if parts.next().is_some() {
        return Err(Error::format(dims_at, "extra fields on dimension line"));
    }
    let shape = GridShape::new(height, width).map_err(|_| Error::format(dims_at, "zero-sized map"))?;
    let start = dims_at + eol + 1;
    let need = 4 * shape.len();
    let have = bytes.len() - start;
    if have < need {
        return Err(Error::format(bytes.len(), format!("short payload: {have} of {need} bytes")));
    }
    if have > need {
        return Err(Error::format(start + need, "trailing bytes after payload"));
    }
    let probs =
        bytes[start..].chunks_exact(4).map(|c| T::of(f32::from_le_bytes([c[0], c[1], c[2], c[3]]) as f64)).collect();
    ProbMap::new(shape, probs)
}

pub fn read_probmap<T: Real>(path: impl AsRef<Path>) -> Result<ProbMap<T>> {
    let path = path.as_ref();
    decode_probmap(&fs::read(path).map_err(|e| Error::io(path, e))?)
}

pub fn write_probmap<T: Real>(pm: &ProbMap<T>, path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    fs::write(path, encode_probmap(pm)).map_err(|e| Error::io(path, e))
}
