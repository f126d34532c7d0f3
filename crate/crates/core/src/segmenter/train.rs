use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::config::TrainConfig;
use super::features::{extract_features, feature_dim, FeatureStack};
use super::model::{logits, predict, ParamVector};
use crate::error::{Error, Result};
use crate::geometry::RayTable;
use crate::grid::{Center, Dataset, MaskGrid};
use crate::loss::{evaluate_logits, LossConfig, LossReport};
use crate::metrics::{jaccard, threshold};
use crate::scalar::Real;
use crate::starshape::estimate_center;

/// One record of the training log.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EpochLog {
    pub epoch: usize,
    /// Learning rate used during this epoch.
    pub lr: f64,
    /// Star weight used in the updates of this epoch.
    pub beta: f64,
    pub train_total: f64,
    pub train_ce: f64,
    /// Computed in every epoch, including warm-up.
    pub train_sh: f64,
    pub val_jaccard: f64,
}

/// Heavy-ball state for a [`ParamVector`].
#[derive(Clone, Debug, PartialEq)]
pub struct Velocity<T> {
    pub weights: Vec<T>,
    pub bias: T,
}

impl<T: Real> Velocity<T> {
    pub fn zeros(dim: usize) -> Self {
        Velocity { weights: vec![T::zero(); dim], bias: T::zero() }
    }
}

/// `v ← μv − lr (g + wd·w)`, `w ← w + v`. The bias is not decayed.
pub fn sgd_step<T: Real>(
    params: &mut ParamVector<T>,
    velocity: &mut Velocity<T>,
    grad: &ParamVector<T>,
    lr: T,
    momentum: T,
    weight_decay: T,
) {
    for ((w, v), &g) in params.weights.iter_mut().zip(velocity.weights.iter_mut()).zip(&grad.weights) {
        *v = momentum * *v - lr * (g + weight_decay * *w);
        *w = *w + *v;
    }
    velocity.bias = momentum * velocity.bias - lr * grad.bias;
    params.bias = params.bias + velocity.bias;
}

struct Prepared<T> {
    features: FeatureStack<T>,
    mask: MaskGrid,
    center: Center,
    rays: RayTable,
}

/// Loss of one image and its gradient with respect to the parameters.
fn image_gradient<T: Real>(
    params: &ParamVector<T>,
    item: &Prepared<T>,
    cfg: &LossConfig,
) -> Result<(LossReport<T>, ParamVector<T>)> {
    let z = logits(params, &item.features)?;
    let (report, g) = evaluate_logits(&z, &item.mask, item.center, cfg, &item.rays)?;
    let mut grad = ParamVector::zeros(item.features.dim());
    for (f, &gp) in item.features.rows().zip(g.values()) {
        for (acc, &x) in grad.weights.iter_mut().zip(f) {
            *acc = *acc + gp * x;
        }
        grad.bias = grad.bias + gp;
    }
    Ok((report, grad))
}

/// Mean per-image Jaccard of thresholded predictions.
pub fn evaluate_params<T: Real>(params: &ParamVector<T>, ds: &Dataset<T>) -> Result<f64> {
    let mut sum = 0.0;
    for s in ds.items() {
        let pm = predict(params, &extract_features(&s.image))?;
        sum += jaccard(&threshold(&pm, T::of(0.5)), &s.mask)?;
    }
    Ok(sum / ds.len() as f64)
}

/// Mini-batch SGD with momentum and weight decay on the pixelwise logistic
/// model.
///
/// Each image uses the estimated center of its mask. The batch gradient is
/// the sum of per-image gradients, accumulated in batch order. Epochs up to
/// `warmup_epochs` use `β = 0`. After each epoch the validation Jaccard is
/// measured; when it has not strictly improved on the best value for
/// `patience` consecutive epochs the rate is divided by `lr_drop_factor`
/// and the counter restarts.
pub fn train<T: Real>(
    ds: &Dataset<T>,
    val: &Dataset<T>,
    cfg: &LossConfig,
    tcfg: &TrainConfig,
) -> Result<(ParamVector<T>, Vec<EpochLog>)> {
    cfg.validate()?;
    tcfg.validate()?;
    if ds.channels() != val.channels() {
        return Err(Error::Validation(format!(
            "training images have {} channels, validation images {}",
            ds.channels(),
            val.channels()
        )));
    }
    let prepared = ds
        .items()
        .par_iter()
        .map(|s| {
            let center =
                estimate_center(&s.mask).map_err(|e| Error::Validation(format!("training mask `{}`: {e}", s.name)))?;
            Ok(Prepared {
                features: extract_features(&s.image),
                rays: cfg.rays(center, s.mask.shape())?,
                mask: s.mask.clone(),
                center,
            })
        })
        .collect::<Result<Vec<_>>>()?;

    let dim = feature_dim(ds.channels());
    let mut params = ParamVector::<T>::zeros(dim);
    let mut velocity = Velocity::zeros(dim);
    let mut rng = ChaCha8Rng::seed_from_u64(tcfg.seed);
    let mut order: Vec<usize> = (0..prepared.len()).collect();
    let warm = cfg.with_beta(0.0);
    let mut lr = tcfg.learning_rate;
    let mut best = f64::NEG_INFINITY;
    let mut stale = 0usize;
    let mut log = Vec::with_capacity(tcfg.total_epochs);

    for epoch in 1..=tcfg.total_epochs {
        let epoch_cfg = if epoch <= tcfg.warmup_epochs { &warm } else { cfg };
        order.shuffle(&mut rng);
        let (mut total, mut ce, mut sh) = (0.0, 0.0, 0.0);
        for (batch, idx) in order.chunks(tcfg.batch_size).enumerate() {
            let results = idx
                .par_iter()
                .map(|&i| image_gradient(&params, &prepared[i], epoch_cfg))
                .collect::<Result<Vec<_>>>()?;
            let mut grad = ParamVector::zeros(dim);
            for (report, g) in &results {
                if !report.is_finite() {
                    return Err(Error::NonFinite { epoch, batch });
                }
                total += report.total.as_f64();
                ce += report.ce.as_f64();
                sh += report.sh.as_f64();
                for (a, &b) in grad.weights.iter_mut().zip(&g.weights) {
                    *a = *a + b;
                }
                grad.bias = grad.bias + g.bias;
            }
            sgd_step(&mut params, &mut velocity, &grad, T::of(lr), T::of(tcfg.momentum), T::of(tcfg.weight_decay));
            if !params.is_finite() {
                return Err(Error::NonFinite { epoch, batch });
            }
        }
        let val_jaccard = evaluate_params(&params, val)?;
        log.push(EpochLog {
            epoch,
            lr,
            beta: epoch_cfg.beta,
            train_total: total,
            train_ce: ce,
            train_sh: sh,
            val_jaccard,
        });
        if val_jaccard > best {
            best = val_jaccard;
            stale = 0;
        } else {
            stale += 1;
            if stale >= tcfg.patience {
                lr /= tcfg.lr_drop_factor;
                stale = 0;
            }
        }
    }
    Ok((params, log))
}
