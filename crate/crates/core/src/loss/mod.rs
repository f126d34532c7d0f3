//! Cross-entropy and star-shape losses with analytic gradients.
//!
//! For a probability map `P`, labels `y` and rays `ray(p)` toward the center:
//!
//! ```text
//! ce = -Σ_p [ y_p ln P̃_p + (1 - y_p) ln(1 - P̃_p) ],   P̃ = clamp(P, ε, 1 - ε)
//! sh =  Σ_p Σ_{q ∈ ray(p)} [y_p = y_q] · |y_p - P_p| · |P_p - P_q|
//! total = α ce + β sh
//! ```
//!
//! Subgradients use `sgn(0) = 0`. Per-pixel terms are collected in pixel order
//! and reduced with [`pairwise_sum`], so values are bit-reproducible.

mod bruteforce;
pub mod gradcheck;

use serde::{Deserialize, Serialize};

pub use bruteforce::{sh_loss_bruteforce, BRUTEFORCE_MAX_SIDE};

use crate::error::{Error, Result};
use crate::geometry::RayTable;
use crate::grid::{Center, GridShape, MaskGrid, Pixel, ProbMap};
use crate::scalar::{pairwise_sum, sgn, Real};

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Reduction {
    #[default]
    Sum,
    /// Divide by the pixel count `|Ω|`.
    MeanPerPixel,
}

/// Loss weights and star-ray discretization.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct LossConfig {
    pub alpha: f64,
    pub beta: f64,
    /// Samples per ray.
    pub m: usize,
    /// Number of quantized directions.
    pub d: usize,
    pub reduction: Reduction,
    /// Probability clamp for the cross-entropy term.
    pub epsilon: f64,
}

impl Default for LossConfig {
    fn default() -> Self {
        LossConfig { alpha: 1.0, beta: 5.0, m: 6, d: 8, reduction: Reduction::Sum, epsilon: 1e-7 }
    }
}

impl LossConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.alpha >= 0.0 && self.alpha.is_finite()) {
            return Err(Error::config("alpha", "must be finite and >= 0"));
        }
        if !(self.beta >= 0.0 && self.beta.is_finite()) {
            return Err(Error::config("beta", "must be finite and >= 0"));
        }
        if self.m < 1 {
            return Err(Error::config("m", "must be >= 1"));
        }
        if self.d != 4 && self.d != 8 {
            return Err(Error::config("d", "must be 4 or 8"));
        }
        if !(self.epsilon > 0.0 && self.epsilon < 0.5) {
            return Err(Error::config("epsilon", "must lie in (0, 0.5)"));
        }
        Ok(())
    }

    pub fn with_beta(self, beta: f64) -> Self {
        LossConfig { beta, ..self }
    }

    fn scale<T: Real>(&self, shape: GridShape) -> T {
        match self.reduction {
            Reduction::Sum => T::one(),
            Reduction::MeanPerPixel => T::one() / T::of(shape.len() as f64),
        }
    }

    fn reduce<T: Real>(&self, terms: &[T], shape: GridShape) -> T {
        let s = pairwise_sum(terms);
        match self.reduction {
            Reduction::Sum => s,
            Reduction::MeanPerPixel => s / T::of(shape.len() as f64),
        }
    }

    /// Ray table for this configuration around `center`.
    pub fn rays(&self, center: Center, shape: GridShape) -> Result<RayTable> {
        RayTable::build(center, self.m, self.d, shape)
    }
}

/// Evaluated loss terms; `ce` and `sh` are unweighted.
#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct LossReport<T> {
    pub total: T,
    pub ce: T,
    pub sh: T,
}

impl<T: Real> LossReport<T> {
    pub fn new(ce: T, sh: T, cfg: &LossConfig) -> Self {
        LossReport { total: T::of(cfg.alpha) * ce + T::of(cfg.beta) * sh, ce, sh }
    }

    pub fn is_finite(&self) -> bool {
        self.total.is_finite() && self.ce.is_finite() && self.sh.is_finite()
    }
}

/// A ray pair and its label gate `B_pq = [y_p == y_q]`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct PairTerm {
    pub p: Pixel,
    pub q: Pixel,
    pub gate: bool,
}

/// Every `(p, q)` pair of a ray table with its gate, in pixel order.
pub fn pair_terms<'a>(y: &'a MaskGrid, rays: &'a RayTable) -> impl Iterator<Item = PairTerm> + 'a {
    let shape = rays.shape();
    (0..shape.len()).flat_map(move |i| {
        rays.targets(i).iter().map(move |&j| PairTerm {
            p: shape.pixel(i),
            q: shape.pixel(j),
            gate: y.label(i) == y.label(j),
        })
    })
}

/// Per-pixel gradient `∂L/∂P_p` or `∂L/∂z_p`.
#[derive(Clone, Debug, PartialEq)]
pub struct GradField<T> {
    shape: GridShape,
    values: Vec<T>,
}

impl<T: Real> GradField<T> {
    pub fn zeros(shape: GridShape) -> Self {
        GradField { shape, values: vec![T::zero(); shape.len()] }
    }

    pub fn from_values(shape: GridShape, values: Vec<T>) -> Result<Self> {
        if values.len() != shape.len() {
            return Err(Error::Validation("gradient length does not match grid".into()));
        }
        if values.iter().any(|v| !v.is_finite()) {
            return Err(Error::Validation("non-finite gradient".into()));
        }
        Ok(GradField { shape, values })
    }

    #[inline]
    pub fn shape(&self) -> GridShape {
        self.shape
    }

    #[inline]
    pub fn values(&self) -> &[T] {
        &self.values
    }

    #[inline]
    pub fn get(&self, p: Pixel) -> T {
        self.values[self.shape.index(p)]
    }

    pub fn max_abs(&self) -> T {
        self.values.iter().fold(T::zero(), |a, &v| a.max(v.abs()))
    }

    fn add_scaled(&mut self, other: &GradField<T>, k: T) {
        for (a, &b) in self.values.iter_mut().zip(&other.values) {
            *a = *a + k * b;
        }
    }
}

fn check_inputs<T: Real>(pm: &ProbMap<T>, y: &MaskGrid) -> Result<()> {
    y.shape().ensure_same(pm.shape())
}

fn check_rays<T: Real>(pm: &ProbMap<T>, center: Center, rays: &RayTable, cfg: &LossConfig) -> Result<()> {
    let shape = pm.shape();
    shape.ensure_contains(center)?;
    shape.ensure_same(rays.shape())?;
    if rays.center() != center || rays.m() != cfg.m || rays.d() != cfg.d {
        return Err(Error::Validation(format!(
            "ray table (center {}, m {}, d {}) does not match center {} with m {}, d {}",
            rays.center(),
            rays.m(),
            rays.d(),
            center,
            cfg.m,
            cfg.d
        )));
    }
    Ok(())
}

/// Binary cross-entropy with clamped probabilities.
pub fn ce_loss<T: Real>(pm: &ProbMap<T>, y: &MaskGrid, cfg: &LossConfig) -> Result<T> {
    check_inputs(pm, y)?;
    let eps = T::of(cfg.epsilon);
    let hi = T::one() - eps;
    let terms: Vec<T> = pm
        .probs()
        .iter()
        .zip(y.labels())
        .map(|(&p, &l)| {
            let p = p.max(eps).min(hi);
            if l == 1 {
                -p.ln()
            } else {
                -(T::one() - p).ln()
            }
        })
        .collect();
    Ok(cfg.reduce(&terms, pm.shape()))
}

/// Star-shape penalty over precomputed rays.
pub fn sh_loss<T: Real>(pm: &ProbMap<T>, y: &MaskGrid, center: Center, cfg: &LossConfig, rays: &RayTable) -> Result<T> {
    check_inputs(pm, y)?;
    check_rays(pm, center, rays, cfg)?;
    let probs = pm.probs();
    let terms: Vec<T> = (0..probs.len())
        .map(|i| {
            let yp = y.label(i);
            let pp = probs[i];
            let miss = (label_value::<T>(yp) - pp).abs();
            if miss == T::zero() {
                return T::zero();
            }
            let mut acc = T::zero();
            for &j in rays.targets(i) {
                if y.label(j) == yp {
                    acc = acc + (pp - probs[j]).abs();
                }
            }
            miss * acc
        })
        .collect();
    Ok(cfg.reduce(&terms, pm.shape()))
}

#[inline]
fn label_value<T: Real>(l: u8) -> T {
    if l == 1 {
        T::one()
    } else {
        T::zero()
    }
}

pub fn combined_loss<T: Real>(
    pm: &ProbMap<T>,
    y: &MaskGrid,
    center: Center,
    cfg: &LossConfig,
    rays: &RayTable,
) -> Result<LossReport<T>> {
    let ce = ce_loss(pm, y, cfg)?;
    let sh = sh_loss(pm, y, center, cfg, rays)?;
    Ok(LossReport::new(ce, sh, cfg))
}

/// `∂ce/∂P`, zero where the clamp is active. Unweighted by `α`.
pub fn ce_grad_prob<T: Real>(pm: &ProbMap<T>, y: &MaskGrid, cfg: &LossConfig) -> Result<GradField<T>> {
    check_inputs(pm, y)?;
    let eps = T::of(cfg.epsilon);
    let hi = T::one() - eps;
    let k = cfg.scale::<T>(pm.shape());
    let values = pm
        .probs()
        .iter()
        .zip(y.labels())
        .map(|(&p, &l)| {
            if p < eps || p > hi {
                T::zero()
            } else if l == 1 {
                -k / p
            } else {
                k / (T::one() - p)
            }
        })
        .collect();
    Ok(GradField { shape: pm.shape(), values })
}

/// `∂sh/∂P`, unweighted by `β`.
pub fn sh_grad_prob<T: Real>(
    pm: &ProbMap<T>,
    y: &MaskGrid,
    center: Center,
    cfg: &LossConfig,
    rays: &RayTable,
) -> Result<GradField<T>> {
    check_inputs(pm, y)?;
    check_rays(pm, center, rays, cfg)?;
    let probs = pm.probs();
    let k = cfg.scale::<T>(pm.shape());
    let mut g = vec![T::zero(); probs.len()];
    for i in 0..probs.len() {
        let yp = y.label(i);
        let pp = probs[i];
        let diff = label_value::<T>(yp) - pp;
        let miss = diff.abs();
        let s_miss = sgn(diff);
        for &j in rays.targets(i) {
            if y.label(j) != yp {
                continue;
            }
            let gap = pp - probs[j];
            let s_gap = sgn(gap);
            g[i] = g[i] + k * (-s_miss * gap.abs() + miss * s_gap);
            g[j] = g[j] - k * miss * s_gap;
        }
    }
    Ok(GradField { shape: pm.shape(), values: g })
}

/// `∂(α ce + β sh)/∂P`.
pub fn grad_prob<T: Real>(
    pm: &ProbMap<T>,
    y: &MaskGrid,
    center: Center,
    cfg: &LossConfig,
    rays: &RayTable,
) -> Result<GradField<T>> {
    let mut g = GradField::zeros(pm.shape());
    if cfg.alpha != 0.0 {
        g.add_scaled(&ce_grad_prob(pm, y, cfg)?, T::of(cfg.alpha));
    } else {
        check_inputs(pm, y)?;
    }
    if cfg.beta != 0.0 {
        g.add_scaled(&sh_grad_prob(pm, y, center, cfg, rays)?, T::of(cfg.beta));
    } else {
        check_rays(pm, center, rays, cfg)?;
    }
    Ok(g)
}

/// `∂(α ce + β sh)/∂z` for `P = sigmoid(z)`.
///
/// The cross-entropy part uses the fused form `α (P - y)`, which neither
/// overflows nor vanishes at saturated logits. The star term is chained
/// through `P (1 - P)`.
pub fn grad_logit<T: Real>(
    pm: &ProbMap<T>,
    logits: &[T],
    y: &MaskGrid,
    center: Center,
    cfg: &LossConfig,
    rays: &RayTable,
) -> Result<GradField<T>> {
    check_inputs(pm, y)?;
    let shape = pm.shape();
    if logits.len() != shape.len() {
        return Err(Error::Validation(format!("{} logits for a {} grid", logits.len(), shape)));
    }
    let tol = 1e-9f64.max(8.0 * T::epsilon().as_f64());
    for (i, (&p, &z)) in pm.probs().iter().zip(logits).enumerate() {
        let gap = (p - crate::scalar::sigmoid(z)).abs().as_f64();
        if !(gap <= tol) {
            return Err(Error::InconsistentLogits { pixel: shape.pixel(i), gap });
        }
    }
    let k = cfg.scale::<T>(shape);
    let alpha = T::of(cfg.alpha);
    let mut values: Vec<T> =
        pm.probs().iter().zip(y.labels()).map(|(&p, &l)| alpha * k * (p - label_value::<T>(l))).collect();
    if cfg.beta != 0.0 {
        let sh = sh_grad_prob(pm, y, center, cfg, rays)?;
        let beta = T::of(cfg.beta);
        for ((v, &gs), &p) in values.iter_mut().zip(sh.values()).zip(pm.probs()) {
            *v = *v + beta * gs * p * (T::one() - p);
        }
    } else {
        check_rays(pm, center, rays, cfg)?;
    }
    Ok(GradField { shape, values })
}

/// Loss and logit gradient for one image in a single call.
pub fn evaluate_logits<T: Real>(
    logits: &[T],
    y: &MaskGrid,
    center: Center,
    cfg: &LossConfig,
    rays: &RayTable,
) -> Result<(LossReport<T>, GradField<T>)> {
    let pm = ProbMap::from_logits(y.shape(), logits)?;
    let report = combined_loss(&pm, y, center, cfg, rays)?;
    let grad = grad_logit(&pm, logits, y, center, cfg, rays)?;
    Ok((report, grad))
}
