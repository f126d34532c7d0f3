//! Raster containers: grid shapes, pixels, images, masks and probability maps.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::scalar::{sigmoid, Real};

/// Height and width of a pixel grid, both at least one.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "RawShape")]
pub struct GridShape {
    height: usize,
    width: usize,
}

#[derive(Deserialize)]
struct RawShape {
    height: usize,
    width: usize,
}

impl TryFrom<RawShape> for GridShape {
    type Error = Error;

    fn try_from(raw: RawShape) -> Result<Self> {
        GridShape::new(raw.height, raw.width)
    }
}

impl GridShape {
    pub fn new(height: usize, width: usize) -> Result<Self> {
        if height == 0 || width == 0 {
            return Err(Error::Validation(format!("grid dimensions must be positive, got {height}x{width}")));
        }
        Ok(GridShape { height, width })
    }

    #[inline]
    pub fn height(&self) -> usize {
        self.height
    }

    #[inline]
    pub fn width(&self) -> usize {
        self.width
    }

    /// Number of pixels, `|Ω|`.
    #[inline]
    pub fn len(&self) -> usize {
        self.height * self.width
    }

    #[inline]
    pub fn is_empty(&self) -> bool {
        false
    }

    #[inline]
    pub fn contains(&self, p: Pixel) -> bool {
        p.row < self.height && p.col < self.width
    }

    #[inline]
    pub fn contains_signed(&self, row: isize, col: isize) -> bool {
        row >= 0 && col >= 0 && (row as usize) < self.height && (col as usize) < self.width
    }

    /// Row-major linear index of `p`.
    #[inline]
    pub fn index(&self, p: Pixel) -> usize {
        debug_assert!(self.contains(p));
        p.row * self.width + p.col
    }

    #[inline]
    pub fn pixel(&self, index: usize) -> Pixel {
        Pixel::new(index / self.width, index % self.width)
    }

    /// All pixels in row-major order.
    pub fn pixels(&self) -> impl Iterator<Item = Pixel> + '_ {
        (0..self.len()).map(move |i| self.pixel(i))
    }

    pub(crate) fn ensure_same(&self, other: GridShape) -> Result<()> {
        if *self == other {
            Ok(())
        } else {
            Err(Error::ShapeMismatch { expected: *self, actual: other })
        }
    }

    pub(crate) fn ensure_contains(&self, center: Pixel) -> Result<()> {
        if self.contains(center) {
            Ok(())
        } else {
            Err(Error::CenterOutOfBounds { center, shape: *self })
        }
    }
}

impl fmt::Display for GridShape {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}x{}", self.height, self.width)
    }
}

/// A pixel position `(row, col)`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Pixel {
    pub row: usize,
    pub col: usize,
}

/// The object center `c` used by the star-shape prior.
pub type Center = Pixel;

impl Pixel {
    #[inline]
    pub const fn new(row: usize, col: usize) -> Self {
        Pixel { row, col }
    }

    /// `self + (dr, dc)` if the result lies inside `shape`.
    #[inline]
    pub fn offset(self, dr: isize, dc: isize, shape: GridShape) -> Option<Pixel> {
        let r = self.row as isize + dr;
        let c = self.col as isize + dc;
        shape.contains_signed(r, c).then(|| Pixel::new(r as usize, c as usize))
    }

    /// Signed difference `other - self` as `(drow, dcol)`.
    #[inline]
    pub fn delta_to(self, other: Pixel) -> (isize, isize) {
        (other.row as isize - self.row as isize, other.col as isize - self.col as isize)
    }
}

impl fmt::Display for Pixel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {})", self.row, self.col)
    }
}

/// Binary label raster; 1 is foreground (lesion), 0 background.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MaskGrid {
    shape: GridShape,
    labels: Vec<u8>,
}

impl MaskGrid {
    pub fn new(shape: GridShape, labels: Vec<u8>) -> Result<Self> {
        if labels.len() != shape.len() {
            return Err(Error::Validation(format!(
                "mask has {} labels, grid {} needs {}",
                labels.len(),
                shape,
                shape.len()
            )));
        }
        if let Some(i) = labels.iter().position(|&l| l > 1) {
            return Err(Error::Validation(format!("mask label {} at {} is not binary", labels[i], shape.pixel(i))));
        }
        Ok(MaskGrid { shape, labels })
    }

    pub fn empty(shape: GridShape) -> Self {
        MaskGrid { shape, labels: vec![0; shape.len()] }
    }

    pub fn from_fn(shape: GridShape, mut f: impl FnMut(Pixel) -> bool) -> Self {
        let labels = shape.pixels().map(|p| u8::from(f(p))).collect();
        MaskGrid { shape, labels }
    }

    /// Builds a mask from nested rows, mainly for tests and small fixtures.
    pub fn from_rows(rows: &[&[u8]]) -> Result<Self> {
        let height = rows.len();
        let width = rows.first().map_or(0, |r| r.len());
        let shape = GridShape::new(height, width)?;
        if rows.iter().any(|r| r.len() != width) {
            return Err(Error::Validation("ragged mask rows".into()));
        }
        MaskGrid::new(shape, rows.concat())
    }

    #[inline]
    pub fn shape(&self) -> GridShape {
        self.shape
    }

    #[inline]
    pub fn labels(&self) -> &[u8] {
        &self.labels
    }

    #[inline]
    pub fn get(&self, p: Pixel) -> bool {
        self.labels[self.shape.index(p)] == 1
    }

    #[inline]
    pub fn label(&self, index: usize) -> u8 {
        self.labels[index]
    }

    #[inline]
    pub fn set(&mut self, p: Pixel, on: bool) {
        let i = self.shape.index(p);
        self.labels[i] = u8::from(on);
    }

    pub fn count_foreground(&self) -> usize {
        self.labels.iter().filter(|&&l| l == 1).count()
    }

    pub fn foreground(&self) -> impl Iterator<Item = Pixel> + '_ {
        self.labels.iter().enumerate().filter(|(_, &l)| l == 1).map(move |(i, _)| self.shape.pixel(i))
    }

    pub fn complement(&self) -> MaskGrid {
        MaskGrid { shape: self.shape, labels: self.labels.iter().map(|&l| 1 - l).collect() }
    }

    /// The mask viewed as a binary probability map.
    pub fn to_probmap<T: Real>(&self) -> ProbMap<T> {
        ProbMap {
            shape: self.shape,
            probs: self.labels.iter().map(|&l| if l == 1 { T::one() } else { T::zero() }).collect(),
        }
    }

    /// Foreground pixels have a background 4-neighbour (or touch the grid edge
    /// when `edge_is_background`).
    pub fn contour(&self, edge_is_background: bool) -> MaskGrid {
        let shape = self.shape;
        MaskGrid::from_fn(shape, |p| {
            if !self.get(p) {
                return false;
            }
            [(-1, 0), (1, 0), (0, -1), (0, 1)].iter().any(|&(dr, dc)| match p.offset(dr, dc, shape) {
                Some(q) => !self.get(q),
                None => edge_is_background,
            })
        })
    }
}

/// Multi-channel float raster stored channel-major: `(channel, row, col)`.
#[derive(Clone, Debug, PartialEq)]
pub struct ImageGrid<T> {
    shape: GridShape,
    channels: usize,
    data: Vec<T>,
}

impl<T: Real> ImageGrid<T> {
    pub fn new(shape: GridShape, channels: usize, data: Vec<T>) -> Result<Self> {
        if channels == 0 {
            return Err(Error::Validation("image needs at least one channel".into()));
        }
        if data.len() != channels * shape.len() {
            return Err(Error::Validation(format!(
                "image data length {} does not match {} channels x {}",
                data.len(),
                channels,
                shape
            )));
        }
        if let Some(i) = data.iter().position(|v| !v.is_finite()) {
            return Err(Error::Validation(format!("non-finite image value at offset {i}")));
        }
        Ok(ImageGrid { shape, channels, data })
    }

    pub fn filled(shape: GridShape, channels: usize, value: T) -> Result<Self> {
        ImageGrid::new(shape, channels, vec![value; channels * shape.len()])
    }

    #[inline]
    pub fn shape(&self) -> GridShape {
        self.shape
    }

    #[inline]
    pub fn channels(&self) -> usize {
        self.channels
    }

    #[inline]
    pub fn data(&self) -> &[T] {
        &self.data
    }

    #[inline]
    pub fn channel(&self, c: usize) -> &[T] {
        let n = self.shape.len();
        &self.data[c * n..(c + 1) * n]
    }

    #[inline]
    pub fn get(&self, channel: usize, p: Pixel) -> T {
        self.data[channel * self.shape.len() + self.shape.index(p)]
    }

    /// Applies `f(channel, value)` to every sample. The result must stay finite.
    pub fn map_channels(&self, mut f: impl FnMut(usize, T) -> T) -> Result<Self> {
        let n = self.shape.len();
        let data = self.data.iter().enumerate().map(|(i, &v)| f(i / n, v)).collect();
        ImageGrid::new(self.shape, self.channels, data)
    }

    /// Mean over channels, per pixel.
    pub fn channel_mean(&self) -> Vec<T> {
        let n = self.shape.len();
        let k = T::of(self.channels as f64);
        (0..n).map(|i| (0..self.channels).map(|c| self.data[c * n + i]).sum::<T>() / k).collect()
    }
}

/// Per-pixel foreground probability `P(y_p = 1 | X; θ)`.
#[derive(Clone, Debug, PartialEq)]
pub struct ProbMap<T> {
    shape: GridShape,
    probs: Vec<T>,
}

impl<T: Real> ProbMap<T> {
    /// Rejects NaN, infinities and values outside `[0, 1]`.
    pub fn new(shape: GridShape, probs: Vec<T>) -> Result<Self> {
        if probs.len() != shape.len() {
            return Err(Error::Validation(format!(
                "probability map has {} values, grid {} needs {}",
                probs.len(),
                shape,
                shape.len()
            )));
        }
        for (i, &v) in probs.iter().enumerate() {
            if !v.is_finite() || v < T::zero() || v > T::one() {
                return Err(Error::Validation(format!("probability {} at {} outside [0, 1]", v, shape.pixel(i))));
            }
        }
        Ok(ProbMap { shape, probs })
    }

    pub fn filled(shape: GridShape, value: T) -> Result<Self> {
        ProbMap::new(shape, vec![value; shape.len()])
    }

    /// Elementwise sigmoid of a logit vector.
    pub fn from_logits(shape: GridShape, logits: &[T]) -> Result<Self> {
        if logits.iter().any(|z| !z.is_finite()) {
            return Err(Error::Validation("non-finite logit".into()));
        }
        ProbMap::new(shape, logits.iter().map(|&z| sigmoid(z)).collect())
    }

    #[inline]
    pub fn shape(&self) -> GridShape {
        self.shape
    }

    #[inline]
    pub fn probs(&self) -> &[T] {
        &self.probs
    }

    #[inline]
    pub fn get(&self, p: Pixel) -> T {
        self.probs[self.shape.index(p)]
    }

    pub fn cast<U: Real>(&self) -> ProbMap<U> {
        ProbMap {
            shape: self.shape,
            probs: self.probs.iter().map(|v| U::of(v.as_f64()).max(U::zero()).min(U::one())).collect(),
        }
    }
}

/// One training pair with the stem it was loaded from.
#[derive(Clone, Debug, PartialEq)]
pub struct Sample<T> {
    pub name: String,
    pub image: ImageGrid<T>,
    pub mask: MaskGrid,
}

/// Ordered, non-empty list of shape-consistent `(image, mask)` pairs.
#[derive(Clone, Debug, PartialEq)]
pub struct Dataset<T> {
    items: Vec<Sample<T>>,
}

impl<T: Real> Dataset<T> {
    pub fn new(items: Vec<Sample<T>>) -> Result<Self> {
        if items.is_empty() {
            return Err(Error::Validation("dataset must contain at least one item".into()));
        }
        for s in &items {
            if s.image.shape() != s.mask.shape() {
                return Err(Error::Validation(format!(
                    "item `{}`: image {} and mask {} differ in shape",
                    s.name,
                    s.image.shape(),
                    s.mask.shape()
                )));
            }
        }
        let ch = items[0].image.channels();
        if let Some(s) = items.iter().find(|s| s.image.channels() != ch) {
            return Err(Error::Validation(format!(
                "item `{}` has {} channels, expected {}",
                s.name,
                s.image.channels(),
                ch
            )));
        }
        Ok(Dataset { items })
    }

    #[inline]
    pub fn items(&self) -> &[Sample<T>] {
        &self.items
    }

    #[inline]
    pub fn len(&self) -> usize {
        self.items.len()
    }

    #[inline]
    pub fn is_empty(&self) -> bool {
        self.items.is_empty()
    }

    pub fn channels(&self) -> usize {
        self.items[0].image.channels()
    }

    pub fn into_items(self) -> Vec<Sample<T>> {
        self.items
    }
}
