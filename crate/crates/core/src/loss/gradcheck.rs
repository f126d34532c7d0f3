//! Central finite-difference checks of the analytic gradients.

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::error::Result;
use crate::geometry::RayTable;
use crate::grid::{Center, GridShape, MaskGrid, Pixel, ProbMap};
use crate::loss::{combined_loss, grad_logit, grad_prob, LossConfig};
use crate::scalar::sigmoid;

/// A random loss instance whose probabilities keep every absolute-value
/// kink and the cross-entropy clamp at least `margin` away.
#[derive(Clone, Debug)]
pub struct Instance {
    pub probs: ProbMap<f64>,
    pub logits: Vec<f64>,
    pub mask: MaskGrid,
    pub center: Center,
    pub rays: RayTable,
}

/// Draws a kink-free instance. Probabilities are a shuffled lattice in
/// `[0.05, 0.95]` with random jitter, so all pairwise gaps exceed
/// `0.45 / |Ω|`.
pub fn random_kink_free_instance(shape: GridShape, cfg: &LossConfig, seed: u64) -> Result<Instance> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let n = shape.len();
    let mut order: Vec<usize> = (0..n).collect();
    order.shuffle(&mut rng);
    let probs: Vec<f64> =
        order.iter().map(|&k| 0.05 + 0.9 * (k as f64 + 0.25 + 0.5 * rng.random::<f64>()) / n as f64).collect();
    let logits: Vec<f64> = probs.iter().map(|&p| (p / (1.0 - p)).ln()).collect();
    let probs: Vec<f64> = logits.iter().map(|&z| sigmoid(z)).collect();
    let density = rng.random_range(0.3..0.7);
    let mask = MaskGrid::from_fn(shape, |_| rng.random::<f64>() < density);
    let center = Pixel::new(rng.random_range(0..shape.height()), rng.random_range(0..shape.width()));
    let rays = cfg.rays(center, shape)?;
    Ok(Instance { probs: ProbMap::new(shape, probs)?, logits, mask, center, rays })
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct GradCheckReport {
    pub max_rel_err: f64,
    pub worst_pixel: Pixel,
}

/// `|a - n| / max(|a|, |n|, 1e-8)`.
pub fn relative_error(analytic: f64, numeric: f64) -> f64 {
    (analytic - numeric).abs() / analytic.abs().max(numeric.abs()).max(1e-8)
}

fn compare(analytic: &[f64], numeric: &[f64], shape: GridShape) -> GradCheckReport {
    let mut worst = GradCheckReport { max_rel_err: 0.0, worst_pixel: Pixel::new(0, 0) };
    for (i, (&a, &n)) in analytic.iter().zip(numeric).enumerate() {
        let e = relative_error(a, n);
        if e > worst.max_rel_err {
            worst = GradCheckReport { max_rel_err: e, worst_pixel: shape.pixel(i) };
        }
    }
    worst
}

/// Central differences of `f` at `x` with step `h`.
pub fn central_differences(x: &[f64], h: f64, mut f: impl FnMut(&[f64]) -> f64) -> Vec<f64> {
    let mut work = x.to_vec();
    (0..x.len())
        .map(|i| {
            let orig = work[i];
            work[i] = orig + h;
            let up = f(&work);
            work[i] = orig - h;
            let down = f(&work);
            work[i] = orig;
            (up - down) / (2.0 * h)
        })
        .collect()
}

/// Compares the probability gradient of the combined loss with central
/// differences over the probabilities.
pub fn check_prob_gradient(inst: &Instance, cfg: &LossConfig, h: f64) -> Result<GradCheckReport> {
    let shape = inst.mask.shape();
    let analytic = grad_prob(&inst.probs, &inst.mask, inst.center, cfg, &inst.rays)?;
    let numeric = central_differences(inst.probs.probs(), h, |x| {
        let pm = ProbMap::new(shape, x.to_vec()).expect("perturbed map stays in range");
        combined_loss(&pm, &inst.mask, inst.center, cfg, &inst.rays).expect("valid instance").total
    });
    Ok(compare(analytic.values(), &numeric, shape))
}

/// Compares the logit gradient with central differences over the logits.
pub fn check_logit_gradient(inst: &Instance, cfg: &LossConfig, h: f64) -> Result<GradCheckReport> {
    let shape = inst.mask.shape();
    let analytic = grad_logit(&inst.probs, &inst.logits, &inst.mask, inst.center, cfg, &inst.rays)?;
    let numeric = central_differences(&inst.logits, h, |z| {
        let pm = ProbMap::from_logits(shape, z).expect("finite logits");
        combined_loss(&pm, &inst.mask, inst.center, cfg, &inst.rays).expect("valid instance").total
    });
    Ok(compare(analytic.values(), &numeric, shape))
}
