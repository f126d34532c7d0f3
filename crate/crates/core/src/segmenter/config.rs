use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Optimizer schedule shared by logit optimization (where an epoch is one
/// step) and model training.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct TrainConfig {
    pub learning_rate: f64,
    pub momentum: f64,
    pub weight_decay: f64,
    pub batch_size: usize,
    /// Leading epochs trained with the star term disabled.
    pub warmup_epochs: usize,
    pub total_epochs: usize,
    pub lr_drop_factor: f64,
    /// Epochs without strict validation improvement before the rate drops.
    pub patience: usize,
    pub seed: u64,
}

impl Default for TrainConfig {
    fn default() -> Self {
        TrainConfig {
            learning_rate: 1e-4,
            momentum: 0.99,
            weight_decay: 5e-5,
            batch_size: 12,
            warmup_epochs: 5,
            total_epochs: 30,
            lr_drop_factor: 10.0,
            patience: 3,
            seed: 0,
        }
    }
}

impl TrainConfig {
    /// Schedule for direct logit optimization from a field of magnitude
    /// [`crate::segmenter::DEFAULT_LOGIT_MAGNITUDE`]: 33 cross-entropy steps,
    /// then 15 steps with the full loss.
    pub fn logit_schedule() -> Self {
        TrainConfig {
            learning_rate: 0.05,
            momentum: 0.5,
            weight_decay: 0.0,
            batch_size: 1,
            warmup_epochs: 33,
            total_epochs: 48,
            ..TrainConfig::default()
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.learning_rate > 0.0 && self.learning_rate.is_finite()) {
            return Err(Error::config("learning_rate", "must be positive and finite"));
        }
        if !(0.0..1.0).contains(&self.momentum) {
            return Err(Error::config("momentum", "must lie in [0, 1)"));
        }
        if !(self.weight_decay >= 0.0 && self.weight_decay.is_finite()) {
            return Err(Error::config("weight_decay", "must be finite and >= 0"));
        }
        if self.batch_size == 0 {
            return Err(Error::config("batch_size", "must be >= 1"));
        }
        if self.warmup_epochs > self.total_epochs {
            return Err(Error::config("warmup_epochs", "must not exceed total_epochs"));
        }
        if !(self.lr_drop_factor >= 1.0 && self.lr_drop_factor.is_finite()) {
            return Err(Error::config("lr_drop_factor", "must be finite and >= 1"));
        }
        if self.patience == 0 {
            return Err(Error::config("patience", "must be >= 1"));
        }
        Ok(())
    }
}
