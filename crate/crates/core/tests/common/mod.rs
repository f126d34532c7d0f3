#![allow(dead_code)]

use num_rational::Ratio;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use starprior::geometry::DirectionSet;
use starprior::grid::{GridShape, MaskGrid, Pixel};

pub type Q = Ratio<i64>;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn random_mask(rng: &mut ChaCha8Rng, shape: GridShape, density: f64) -> MaskGrid {
    MaskGrid::from_fn(shape, |_| rng.random::<f64>() < density)
}

pub fn random_pixel(rng: &mut ChaCha8Rng, shape: GridShape) -> Pixel {
    Pixel::new(rng.random_range(0..shape.height()), rng.random_range(0..shape.width()))
}

/// Open interval of `t` where `a + t d` lies strictly within `half` of `center`.
/// `None` means every `t`; an empty interval is returned as `(1, 0)`.
fn slab(a: i64, d: i64, center: i64) -> Option<(Q, Q)> {
    let half = Q::new(1, 2);
    if d == 0 {
        return if a == center { None } else { Some((Q::from(1), Q::from(0))) };
    }
    let t1 = (Q::from(center - a) - half) / Q::from(d);
    let t2 = (Q::from(center - a) + half) / Q::from(d);
    Some(if t1 < t2 { (t1, t2) } else { (t2, t1) })
}

/// Whether the closed segment between pixel centers `p` and `c` meets the
/// open unit square of pixel `q`, in exact rational arithmetic.
pub fn segment_meets_open_square(p: Pixel, c: Pixel, q: Pixel) -> bool {
    let (pr, pc) = (p.row as i64, p.col as i64);
    let (dr, dc) = (c.row as i64 - pr, c.col as i64 - pc);
    let mut lo: Option<Q> = None;
    let mut hi: Option<Q> = None;
    for s in [slab(pr, dr, q.row as i64), slab(pc, dc, q.col as i64)].into_iter().flatten() {
        lo = Some(lo.map_or(s.0, |l| l.max(s.0)));
        hi = Some(hi.map_or(s.1, |h| h.min(s.1)));
    }
    match (lo, hi) {
        (Some(l), Some(h)) => l < h && l < Q::from(1) && h > Q::from(0),
        _ => true,
    }
}

/// Brute force star check: `p` violates when any background pixel's open
/// square meets the segment to `c`. Only the bounding box of the segment can
/// meet it.
pub fn brute_violations(mask: &MaskGrid, c: Pixel) -> MaskGrid {
    let shape = mask.shape();
    MaskGrid::from_fn(shape, |p| {
        if !mask.get(p) {
            return false;
        }
        let (r0, r1) = (p.row.min(c.row), p.row.max(c.row));
        let (c0, c1) = (p.col.min(c.col), p.col.max(c.col));
        (r0..=r1).any(|r| {
            (c0..=c1).any(|col| {
                let q = Pixel::new(r, col);
                !mask.get(q) && segment_meets_open_square(p, c, q)
            })
        })
    })
}

/// Squared distance from each region pixel to the nearest pixel outside the
/// region, treating everything beyond the grid as outside.
pub fn brute_sq_distance(region: &MaskGrid) -> Vec<i64> {
    let shape = region.shape();
    let (h, w) = (shape.height() as i64, shape.width() as i64);
    shape
        .pixels()
        .map(|p| {
            if !region.get(p) {
                return 0;
            }
            let mut best = i64::MAX;
            for r in -1..=h {
                for c in -1..=w {
                    let inside = r >= 0 && c >= 0 && r < h && c < w && region.get(Pixel::new(r as usize, c as usize));
                    if !inside {
                        let d = (r - p.row as i64).pow(2) + (c - p.col as i64).pow(2);
                        best = best.min(d);
                    }
                }
            }
            best
        })
        .collect()
}

/// Two-sided exact Wilcoxon p-value by enumerating all sign patterns.
pub fn enumerate_wilcoxon_p(ranks: &[f64], w_plus: f64) -> f64 {
    let n = ranks.len();
    let total = 1u64 << n;
    let (mut le, mut ge) = (0u64, 0u64);
    for mask in 0..total {
        let s: f64 = (0..n).filter(|i| mask >> i & 1 == 1).map(|i| ranks[i]).sum();
        if s <= w_plus + 1e-9 {
            le += 1;
        }
        if s >= w_plus - 1e-9 {
            ge += 1;
        }
    }
    (2.0 * le.min(ge) as f64 / total as f64).min(1.0)
}

/// Best direction by floating-point cosine; near-equal cosines resolve to
/// the lowest index.
pub fn cosine_oracle(p: Pixel, c: Pixel, dirs: &DirectionSet) -> usize {
    let (vr, vc) = ((c.row as f64 - p.row as f64), (c.col as f64 - p.col as f64));
    let vn = vr.hypot(vc);
    let cos: Vec<f64> = dirs
        .steps()
        .iter()
        .map(|&(sr, sc)| (vr * sr as f64 + vc * sc as f64) / (vn * (sr as f64).hypot(sc as f64)))
        .collect();
    let best = cos.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    cos.iter().position(|&v| v >= best - 1e-12).unwrap()
}

/// Walk along the quantized step, written independently of the library.
pub fn reference_walk(p: Pixel, c: Pixel, m: usize, dirs: &DirectionSet, shape: GridShape) -> Vec<Pixel> {
    if p == c {
        return vec![];
    }
    let (sr, sc) = dirs.step(cosine_oracle(p, c, dirs));
    let mut out = vec![];
    let (mut r, mut col) = (p.row as i64, p.col as i64);
    for _ in 0..m {
        r += sr as i64;
        col += sc as i64;
        if r < 0 || col < 0 || r >= shape.height() as i64 || col >= shape.width() as i64 {
            break;
        }
        let ahead = (c.row as i64 - r) * sr as i64 + (c.col as i64 - col) * sc as i64;
        if ahead < 0 {
            break;
        }
        out.push(Pixel::new(r as usize, col as usize));
        if (r, col) == (c.row as i64, c.col as i64) {
            break;
        }
    }
    out
}

/// Star penalty by direct summation over reference ray walks.
pub fn direct_sh(probs: &[f64], mask: &MaskGrid, c: Pixel, m: usize, d: usize) -> f64 {
    let shape = mask.shape();
    let dirs = DirectionSet::with_count(d).unwrap();
    let mut total = 0.0;
    for p in shape.pixels() {
        let yp = f64::from(mask.label(shape.index(p)));
        let pp = probs[shape.index(p)];
        for q in reference_walk(p, c, m, &dirs, shape) {
            if mask.get(q) == mask.get(p) {
                total += (yp - pp).abs() * (pp - probs[shape.index(q)]).abs();
            }
        }
    }
    total
}

/// Clamped binary cross-entropy by direct summation.
pub fn direct_ce(probs: &[f64], mask: &MaskGrid, eps: f64) -> f64 {
    probs
        .iter()
        .zip(mask.labels())
        .map(|(&p, &l)| {
            let p = p.clamp(eps, 1.0 - eps);
            if l == 1 {
                -p.ln()
            } else {
                -(1.0 - p).ln()
            }
        })
        .sum()
}

pub fn random_probs(rng: &mut ChaCha8Rng, n: usize) -> Vec<f64> {
    (0..n).map(|_| rng.random::<f64>()).collect()
}
