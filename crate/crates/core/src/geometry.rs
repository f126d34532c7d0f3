//! Quantized rays toward the object center.
//!
//! A pixel `p` looks at the center `c` along one of `d` compass steps: the one
//! whose direction has the largest cosine with `c - p`. The ray then walks
//! `q_j = p + j * step` for `j = 1..=m`, stopping early at the grid edge, at
//! the center itself (inclusive) or once a sample would overshoot the center
//! (`dot(c - q_j, step) < 0`, exclusive).
//!
//! The direction order is a stable contract: ties in the quantization are
//! broken by the lowest index.

use crate::error::{Error, Result};
use crate::grid::{Center, GridShape, Pixel};

/// The eight compass steps as `(drow, dcol)`, counter-clockwise from east.
pub const COMPASS8: [(isize, isize); 8] = [
    (0, 1),   // E
    (-1, 1),  // NE
    (-1, 0),  // N
    (-1, -1), // NW
    (0, -1),  // W
    (1, -1),  // SW
    (1, 0),   // S
    (1, 1),   // SE
];

pub const COMPASS8_NAMES: [&str; 8] = ["E", "NE", "N", "NW", "W", "SW", "S", "SE"];

/// The four axis steps E, N, W, S.
pub const COMPASS4: [(isize, isize); 4] = [(0, 1), (-1, 0), (0, -1), (1, 0)];

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DirectionSet {
    steps: Vec<(isize, isize)>,
}

impl DirectionSet {
    pub fn compass8() -> Self {
        DirectionSet { steps: COMPASS8.to_vec() }
    }

    pub fn compass4() -> Self {
        DirectionSet { steps: COMPASS4.to_vec() }
    }

    /// The standard set for `d` directions; only 4 and 8 are defined.
    pub fn with_count(d: usize) -> Result<Self> {
        match d {
            8 => Ok(Self::compass8()),
            4 => Ok(Self::compass4()),
            _ => Err(Error::config("d", format!("unsupported direction count {d}, expected 4 or 8"))),
        }
    }

    #[inline]
    pub fn len(&self) -> usize {
        self.steps.len()
    }

    #[inline]
    pub fn is_empty(&self) -> bool {
        self.steps.is_empty()
    }

    #[inline]
    pub fn step(&self, index: usize) -> (isize, isize) {
        self.steps[index]
    }

    #[inline]
    pub fn steps(&self) -> &[(isize, isize)] {
        &self.steps
    }

    /// Index of `step` in this set, if present.
    pub fn index_of(&self, step: (isize, isize)) -> Option<usize> {
        self.steps.iter().position(|&s| s == step)
    }
}

/// Compares `a / sqrt(na)` against `b / sqrt(nb)` exactly for integers.
fn cmp_scaled(a: i128, na: i128, b: i128, nb: i128) -> std::cmp::Ordering {
    let lhs = a.signum() * a * a * nb;
    let rhs = b.signum() * b * b * na;
    lhs.cmp(&rhs)
}

/// The step index with the largest cosine to `c - p`.
pub fn quantize_direction(p: Pixel, c: Center, dirs: &DirectionSet) -> Result<usize> {
    if p == c {
        return Err(Error::CenterHasNoDirection);
    }
    let (vr, vc) = p.delta_to(c);
    let (vr, vc) = (vr as i128, vc as i128);
    let mut best = 0usize;
    let (mut best_dot, mut best_norm) = (0i128, 1i128);
    for (i, &(sr, sc)) in dirs.steps().iter().enumerate() {
        let (sr, sc) = (sr as i128, sc as i128);
        let dot = vr * sr + vc * sc;
        let norm = sr * sr + sc * sc;
        if i == 0 || cmp_scaled(dot, norm, best_dot, best_norm).is_gt() {
            best = i;
            best_dot = dot;
            best_norm = norm;
        }
    }
    Ok(best)
}

/// The sampled part of segment `l_pc` for one pixel.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RaySample {
    pub pixel: Pixel,
    /// `None` exactly when `pixel` is the center.
    pub direction: Option<usize>,
    /// Samples ordered nearest to `pixel` first.
    pub samples: Vec<Pixel>,
}

pub fn ray_samples(p: Pixel, c: Center, m: usize, dirs: &DirectionSet, shape: GridShape) -> RaySample {
    let Ok(direction) = quantize_direction(p, c, dirs) else {
        return RaySample { pixel: p, direction: None, samples: Vec::new() };
    };
    let (sr, sc) = dirs.step(direction);
    let mut samples = Vec::with_capacity(m);
    for j in 1..=m as isize {
        let Some(q) = p.offset(j * sr, j * sc, shape) else { break };
        let (dr, dc) = q.delta_to(c);
        if dr * sr + dc * sc < 0 {
            break;
        }
        samples.push(q);
        if q == c {
            break;
        }
    }
    RaySample { pixel: p, direction: Some(direction), samples }
}

/// Precomputed rays for every pixel of a grid, in compressed row form.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RayTable {
    shape: GridShape,
    center: Center,
    m: usize,
    d: usize,
    directions: Vec<Option<u8>>,
    offsets: Vec<usize>,
    targets: Vec<usize>,
}

pub fn all_ray_samples(c: Center, m: usize, dirs: &DirectionSet, shape: GridShape) -> RayTable {
    let mut directions = Vec::with_capacity(shape.len());
    let mut offsets = Vec::with_capacity(shape.len() + 1);
    let mut targets = Vec::new();
    offsets.push(0);
    for p in shape.pixels() {
        let ray = ray_samples(p, c, m, dirs, shape);
        directions.push(ray.direction.map(|d| d as u8));
        targets.extend(ray.samples.iter().map(|&q| shape.index(q)));
        offsets.push(targets.len());
    }
    RayTable { shape, center: c, m, d: dirs.len(), directions, offsets, targets }
}

impl RayTable {
    /// Convenience constructor from a direction count.
    pub fn build(c: Center, m: usize, d: usize, shape: GridShape) -> Result<Self> {
        shape.ensure_contains(c)?;
        Ok(all_ray_samples(c, m, &DirectionSet::with_count(d)?, shape))
    }

    #[inline]
    pub fn shape(&self) -> GridShape {
        self.shape
    }

    #[inline]
    pub fn center(&self) -> Center {
        self.center
    }

    #[inline]
    pub fn m(&self) -> usize {
        self.m
    }

    #[inline]
    pub fn d(&self) -> usize {
        self.d
    }

    /// Linear indices of the samples on the ray of pixel `index`.
    #[inline]
    pub fn targets(&self, index: usize) -> &[usize] {
        &self.targets[self.offsets[index]..self.offsets[index + 1]]
    }

    pub fn get(&self, p: Pixel) -> RaySample {
        let i = self.shape.index(p);
        RaySample {
            pixel: p,
            direction: self.directions[i].map(usize::from),
            samples: self.targets(i).iter().map(|&t| self.shape.pixel(t)).collect(),
        }
    }

    pub fn rays(&self) -> impl Iterator<Item = RaySample> + '_ {
        self.shape.pixels().map(move |p| self.get(p))
    }

    /// Total number of `(p, q)` pairs.
    pub fn pair_count(&self) -> usize {
        self.targets.len()
    }
}
