use super::config::TrainConfig;
use crate::error::{Error, Result};
use crate::grid::{Center, GridShape, MaskGrid, ProbMap};
use crate::loss::{evaluate_logits, LossConfig, LossReport};
use crate::scalar::Real;
use crate::starshape::estimate_center;

/// Logit magnitude used to turn a binary mask into an initial field.
pub const DEFAULT_LOGIT_MAGNITUDE: f64 = 4.0;

/// Total loss above which optimization is reported as diverged.
pub const DIVERGENCE_LIMIT: f64 = 1e12;

/// Unbounded per-pixel logits; `sigmoid(z)` is the probability map.
#[derive(Clone, Debug, PartialEq)]
pub struct LogitField<T> {
    shape: GridShape,
    z: Vec<T>,
}

impl<T: Real> LogitField<T> {
    pub fn new(shape: GridShape, z: Vec<T>) -> Result<Self> {
        if z.len() != shape.len() {
            return Err(Error::Validation(format!("{} logits for a {shape} grid", z.len())));
        }
        if let Some(i) = z.iter().position(|v| !v.is_finite()) {
            return Err(Error::Validation(format!("non-finite logit at {}", shape.pixel(i))));
        }
        Ok(LogitField { shape, z })
    }

    pub fn zeros(shape: GridShape) -> Self {
        LogitField { shape, z: vec![T::zero(); shape.len()] }
    }

    /// `+magnitude` on foreground, `-magnitude` on background.
    pub fn from_mask(mask: &MaskGrid, magnitude: T) -> Self {
        let z = mask.labels().iter().map(|&l| if l == 1 { magnitude } else { -magnitude }).collect();
        LogitField { shape: mask.shape(), z }
    }

    pub fn shape(&self) -> GridShape {
        self.shape
    }

    pub fn values(&self) -> &[T] {
        &self.z
    }

    pub fn probs(&self) -> ProbMap<T> {
        ProbMap::from_logits(self.shape, &self.z).expect("finite logits")
    }
}

/// Gradient descent with heavy-ball momentum on the logits, supervised by
/// `y` and using its estimated center for the star term.
pub fn optimize_logits<T: Real>(
    y: &MaskGrid,
    init: &LogitField<T>,
    cfg: &LossConfig,
    tcfg: &TrainConfig,
) -> Result<(LogitField<T>, Vec<LossReport<T>>)> {
    let center = estimate_center(y)?;
    optimize_logits_with_center(y, center, init, cfg, tcfg)
}

/// As [`optimize_logits`] with an explicit center.
///
/// Runs `tcfg.total_epochs` steps `v ← μv − lr·g`, `z ← z + v`; the first
/// `tcfg.warmup_epochs` steps use `β = 0`. The trace holds the loss
/// evaluated before each step. Weight decay and batching do not apply.
pub fn optimize_logits_with_center<T: Real>(
    y: &MaskGrid,
    center: Center,
    init: &LogitField<T>,
    cfg: &LossConfig,
    tcfg: &TrainConfig,
) -> Result<(LogitField<T>, Vec<LossReport<T>>)> {
    cfg.validate()?;
    tcfg.validate()?;
    y.shape().ensure_same(init.shape())?;
    let rays = cfg.rays(center, y.shape())?;
    let warm = cfg.with_beta(0.0);
    let lr = T::of(tcfg.learning_rate);
    let mu = T::of(tcfg.momentum);
    let mut z = init.z.clone();
    let mut v = vec![T::zero(); z.len()];
    let mut trace = Vec::with_capacity(tcfg.total_epochs);
    for step in 0..tcfg.total_epochs {
        let step_cfg = if step < tcfg.warmup_epochs { &warm } else { cfg };
        let (report, grad) = evaluate_logits(&z, y, center, step_cfg, &rays)?;
        let total = report.total.as_f64();
        if !report.is_finite() || total > DIVERGENCE_LIMIT {
            return Err(Error::Diverged { step, loss: total });
        }
        trace.push(report);
        for ((zi, vi), &g) in z.iter_mut().zip(v.iter_mut()).zip(grad.values()) {
            *vi = mu * *vi - lr * g;
            *zi = *zi + *vi;
        }
        if z.iter().any(|x| !x.is_finite()) {
            return Err(Error::Diverged { step, loss: f64::INFINITY });
        }
    }
    Ok((LogitField { shape: init.shape, z }, trace))
}
