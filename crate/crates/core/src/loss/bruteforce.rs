//! Reference evaluation of the star term without precomputed rays.

use crate::error::{Error, Result};
use crate::grid::{Center, MaskGrid, ProbMap};
use crate::loss::LossConfig;
use crate::scalar::Real;

/// Largest grid side accepted by [`sh_loss_bruteforce`].
pub const BRUTEFORCE_MAX_SIDE: usize = 64;

fn steps(d: usize) -> Result<&'static [(i64, i64)]> {
    const EIGHT: [(i64, i64); 8] = [(0, 1), (-1, 1), (-1, 0), (-1, -1), (0, -1), (1, -1), (1, 0), (1, 1)];
    const FOUR: [(i64, i64); 4] = [(0, 1), (-1, 0), (0, -1), (1, 0)];
    match d {
        8 => Ok(&EIGHT),
        4 => Ok(&FOUR),
        _ => Err(Error::config("d", "must be 4 or 8")),
    }
}

/// Star term by a naive loop: for every pixel the direction and the walk are
/// recomputed from scratch with floating-point cosines.
pub fn sh_loss_bruteforce<T: Real>(pm: &ProbMap<T>, y: &MaskGrid, center: Center, cfg: &LossConfig) -> Result<T> {
    let shape = pm.shape();
    if shape.height() > BRUTEFORCE_MAX_SIDE || shape.width() > BRUTEFORCE_MAX_SIDE {
        return Err(Error::GridTooLarge(shape));
    }
    y.shape().ensure_same(shape)?;
    shape.ensure_contains(center)?;
    let dirs = steps(cfg.d)?;
    let (h, w) = (shape.height() as i64, shape.width() as i64);
    let (cr, cc) = (center.row as i64, center.col as i64);
    let label = |r: i64, c: i64| y.labels()[(r * w + c) as usize];
    let prob = |r: i64, c: i64| pm.probs()[(r * w + c) as usize];

    let mut total = 0.0f64;
    for r in 0..h {
        for c in 0..w {
            if (r, c) == (cr, cc) {
                continue;
            }
            let (vr, vc) = ((cr - r) as f64, (cc - c) as f64);
            let vn = (vr * vr + vc * vc).sqrt();
            let mut best = (f64::NEG_INFINITY, (0, 0));
            for &(sr, sc) in dirs {
                let cos = (vr * sr as f64 + vc * sc as f64) / (vn * ((sr * sr + sc * sc) as f64).sqrt());
                if cos > best.0 {
                    best = (cos, (sr, sc));
                }
            }
            let (sr, sc) = best.1;
            let yp = label(r, c);
            let pp = prob(r, c).as_f64();
            let miss = (yp as f64 - pp).abs();
            let mut j = 1i64;
            while j <= cfg.m as i64 {
                let (qr, qc) = (r + j * sr, c + j * sc);
                if qr < 0 || qc < 0 || qr >= h || qc >= w {
                    break;
                }
                if (cr - qr) * sr + (cc - qc) * sc < 0 {
                    break;
                }
                if label(qr, qc) == yp {
                    total += miss * (pp - prob(qr, qc).as_f64()).abs();
                }
                if (qr, qc) == (cr, cc) {
                    break;
                }
                j += 1;
            }
        }
    }
    if cfg.reduction == crate::loss::Reduction::MeanPerPixel {
        total /= shape.len() as f64;
    }
    Ok(T::of(total))
}
