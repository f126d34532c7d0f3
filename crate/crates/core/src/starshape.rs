//! Exact star-convexity analysis of binary masks.
//!
//! A foreground pixel `p` satisfies the star constraint for center `c` when
//! every pixel whose open unit square meets the straight segment between the
//! centers of `p` and `c` is foreground. Corner-only contacts do not count,
//! so the segment from `(0, 0)` to `(2, 2)` covers exactly the diagonal.

use std::collections::VecDeque;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::grid::{Center, GridShape, MaskGrid, Pixel};

/// Pixels whose open square meets the segment from `p` to `c`, ordered from
/// `p` to `c` (both included).
pub fn segment_pixels(p: Pixel, c: Pixel) -> Vec<Pixel> {
    let (dr, dc) = p.delta_to(c);
    let (nr, nc) = (dr.unsigned_abs(), dc.unsigned_abs());
    let (sr, sc) = (dr.signum(), dc.signum());
    let mut out = Vec::with_capacity(nr + nc + 1);
    let (mut r, mut col) = (p.row as isize, p.col as isize);
    out.push(p);
    // Crossing the i-th row boundary happens at t = (2i - 1) / (2 nr), the
    // j-th column boundary at t = (2j - 1) / (2 nc). Compare cross-multiplied.
    let (mut i, mut j) = (1usize, 1usize);
    while i <= nr || j <= nc {
        let row_next = if i <= nr { Some((2 * i - 1) * nc) } else { None };
        let col_next = if j <= nc { Some((2 * j - 1) * nr) } else { None };
        match (row_next, col_next) {
            (Some(a), Some(b)) if a == b => {
                r += sr;
                col += sc;
                i += 1;
                j += 1;
            }
            (Some(a), Some(b)) if a < b => {
                r += sr;
                i += 1;
            }
            (Some(_), None) => {
                r += sr;
                i += 1;
            }
            _ => {
                col += sc;
                j += 1;
            }
        }
        out.push(Pixel::new(r as usize, col as usize));
    }
    out
}

/// Per-pixel violation flags; always a subset of the analyzed foreground.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ViolationMap {
    flags: MaskGrid,
}

impl ViolationMap {
    pub fn flags(&self) -> &MaskGrid {
        &self.flags
    }

    pub fn into_mask(self) -> MaskGrid {
        self.flags
    }

    pub fn count(&self) -> usize {
        self.flags.count_foreground()
    }

    pub fn is_clean(&self) -> bool {
        self.count() == 0
    }
}

/// Flags foreground pixels whose segment to `c` crosses background.
pub fn check_star(mask: &MaskGrid, c: Center) -> Result<ViolationMap> {
    let shape = mask.shape();
    shape.ensure_contains(c)?;
    let flags = MaskGrid::from_fn(shape, |p| mask.get(p) && segment_pixels(p, c).iter().any(|&q| !mask.get(q)));
    Ok(ViolationMap { flags })
}

/// The largest subset of `mask` that is star-shaped with respect to `c`.
///
/// Star-shaped subsets are closed under union, so repeatedly removing flagged
/// pixels converges to the maximal one. If `c` is background the result is
/// empty.
pub fn star_core(mask: &MaskGrid, c: Center) -> Result<MaskGrid> {
    let mut current = mask.clone();
    loop {
        let v = check_star(&current, c)?;
        if v.is_clean() {
            return Ok(current);
        }
        for p in v.flags().foreground() {
            current.set(p, false);
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ViolationStats {
    pub violating: usize,
    /// Foreground pixels of all analyzed masks.
    pub foreground: usize,
    pub fraction: f64,
    /// Masks without foreground; they are excluded from the counts.
    #[serde(skip)]
    pub empty_masks: usize,
}

impl ViolationStats {
    fn from_counts(violating: usize, foreground: usize, empty_masks: usize) -> Self {
        let fraction = if foreground == 0 { 0.0 } else { violating as f64 / foreground as f64 };
        ViolationStats { violating, foreground, fraction, empty_masks }
    }
}

/// Pooled violation fraction, each mask judged against its estimated center.
pub fn dataset_violation_stats<'a>(masks: impl IntoIterator<Item = &'a MaskGrid>) -> ViolationStats {
    let (mut violating, mut foreground, mut empty) = (0usize, 0usize, 0usize);
    for m in masks {
        match estimate_center(m) {
            Ok(c) => {
                violating += check_star(m, c).expect("estimated center is in bounds").count();
                foreground += m.count_foreground();
            }
            Err(_) => empty += 1,
        }
    }
    ViolationStats::from_counts(violating, foreground, empty)
}

/// Violation statistics of a single mask against a given center.
pub fn violation_stats(mask: &MaskGrid, c: Center) -> Result<ViolationStats> {
    let fg = mask.count_foreground();
    let v = check_star(mask, c)?.count();
    Ok(ViolationStats::from_counts(v, fg, usize::from(fg == 0)))
}

/// 4-connected foreground components, each in raster order of discovery.
pub fn components(mask: &MaskGrid) -> Vec<Vec<Pixel>> {
    let shape = mask.shape();
    let mut seen = vec![false; shape.len()];
    let mut out = Vec::new();
    for start in shape.pixels() {
        let si = shape.index(start);
        if !mask.get(start) || seen[si] {
            continue;
        }
        seen[si] = true;
        let mut comp = Vec::new();
        let mut queue = VecDeque::from([start]);
        while let Some(p) = queue.pop_front() {
            comp.push(p);
            for (dr, dc) in [(-1, 0), (1, 0), (0, -1), (0, 1)] {
                if let Some(q) = p.offset(dr, dc, shape) {
                    let qi = shape.index(q);
                    if mask.get(q) && !seen[qi] {
                        seen[qi] = true;
                        queue.push_back(q);
                    }
                }
            }
        }
        out.push(comp);
    }
    out
}

/// The largest 4-connected component; ties go to the one found first in
/// raster order.
pub fn largest_component(mask: &MaskGrid) -> Option<MaskGrid> {
    let comps = components(mask);
    let mut best: Option<&Vec<Pixel>> = None;
    for c in &comps {
        if best.is_none_or(|b| c.len() > b.len()) {
            best = Some(c);
        }
    }
    best.map(|comp| {
        let mut m = MaskGrid::empty(mask.shape());
        for &p in comp {
            m.set(p, true);
        }
        m
    })
}

/// One-dimensional squared distance transform (lower envelope of parabolas).
fn edt_1d(f: &[f64], out: &mut [f64]) {
    let n = f.len();
    let mut v = vec![0usize; n];
    let mut z = vec![0.0f64; n + 1];
    let mut k = 0usize;
    z[0] = f64::NEG_INFINITY;
    z[1] = f64::INFINITY;
    for q in 1..n {
        let mut s;
        loop {
            let vk = v[k];
            s = ((f[q] + (q * q) as f64) - (f[vk] + (vk * vk) as f64)) / (2.0 * (q as f64 - vk as f64));
            if s > z[k] {
                break;
            }
            k -= 1;
        }
        k += 1;
        v[k] = q;
        z[k] = s;
        z[k + 1] = f64::INFINITY;
    }
    k = 0;
    for (q, o) in out.iter_mut().enumerate() {
        while z[k + 1] < q as f64 {
            k += 1;
        }
        let d = q as f64 - v[k] as f64;
        *o = d * d + f[v[k]];
    }
}

/// Squared Euclidean distance from each pixel of `region` to the nearest
/// pixel outside it. The grid is padded by a ring of outside pixels, so
/// region pixels on the edge are at distance 1. Values are exact integers.
pub fn squared_distance_to_outside(region: &MaskGrid) -> Vec<f64> {
    let shape = region.shape();
    let (h, w) = (shape.height() + 2, shape.width() + 2);
    let inf = ((h * h + w * w) as f64) * 4.0;
    let mut grid = vec![0.0f64; h * w];
    for p in shape.pixels() {
        if region.get(p) {
            grid[(p.row + 1) * w + p.col + 1] = inf;
        }
    }
    let mut col = vec![0.0; h];
    let mut tmp = vec![0.0; h];
    for x in 0..w {
        for y in 0..h {
            col[y] = grid[y * w + x];
        }
        edt_1d(&col, &mut tmp);
        for y in 0..h {
            grid[y * w + x] = tmp[y];
        }
    }
    let mut row = vec![0.0; w];
    for y in 0..h {
        edt_1d(&grid[y * w..(y + 1) * w], &mut row);
        grid[y * w..(y + 1) * w].copy_from_slice(&row);
    }
    shape.pixels().map(|p| grid[(p.row + 1) * w + p.col + 1]).collect()
}

/// Center of the largest component: its rounded centroid when that pixel
/// belongs to the component, otherwise the component pixel farthest from
/// the background (smallest `(row, col)` on ties).
pub fn estimate_center(mask: &MaskGrid) -> Result<Center> {
    let comp = largest_component(mask).ok_or(Error::NoForeground)?;
    let n = comp.count_foreground() as f64;
    let (sr, sc) = comp.foreground().fold((0.0, 0.0), |(a, b), p| (a + p.row as f64, b + p.col as f64));
    let centroid = Pixel::new((sr / n).round() as usize, (sc / n).round() as usize);
    if comp.get(centroid) {
        return Ok(centroid);
    }
    let dist = squared_distance_to_outside(&comp);
    let shape: GridShape = comp.shape();
    let mut best: Option<(f64, Pixel)> = None;
    for p in comp.foreground() {
        let d = dist[shape.index(p)];
        if best.is_none_or(|(bd, _)| d > bd) {
            best = Some((d, p));
        }
    }
    Ok(best.expect("component is non-empty").1)
}
