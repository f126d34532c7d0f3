use std::fs;
use std::path::PathBuf;

use serde::{Deserialize, Serialize};
use starprior::loss::{LossConfig, Reduction};
use starprior::segmenter::{TrainConfig, DEFAULT_LOGIT_MAGNITUDE};
use starprior::synth::DatasetParams;

use crate::args::{GlobalArgs, LossArgs, ReductionArg, ScheduleArgs};
use crate::error::{CliError, CliResult};

/// Options of the `segment` subcommand.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SegmentConfig {
    pub kappa: f64,
    pub half_angle: f64,
    pub schedule: TrainConfig,
}

impl Default for SegmentConfig {
    fn default() -> Self {
        SegmentConfig { kappa: DEFAULT_LOGIT_MAGNITUDE, half_angle: 0.35, schedule: TrainConfig::logit_schedule() }
    }
}

/// Contents of a `--config` file. Every field is optional.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    pub seed: u64,
    pub out_dir: Option<PathBuf>,
    pub loss: LossConfig,
    pub train: TrainConfig,
    pub segment: SegmentConfig,
    pub dataset: DatasetParams,
}

impl RunConfig {
    pub fn load(global: &GlobalArgs) -> CliResult<Self> {
        let mut cfg = match &global.config {
            Some(path) => {
                let text = fs::read_to_string(path)
                    .map_err(|e| CliError::usage(format!("cannot read config {}: {e}", path.display())))?;
                serde_json::from_str(&text)
                    .map_err(|e| CliError::usage(format!("invalid config {}: {e}", path.display())))?
            }
            None => RunConfig::default(),
        };
        if let Some(seed) = global.seed {
            cfg.seed = seed;
        }
        if let Some(dir) = &global.out_dir {
            cfg.out_dir = Some(dir.clone());
        }
        cfg.train.seed = cfg.seed;
        cfg.segment.schedule.seed = cfg.seed;
        Ok(cfg)
    }

    pub fn out_dir(&self) -> CliResult<PathBuf> {
        self.out_dir.clone().ok_or_else(|| CliError::usage("--out-dir is required for this subcommand"))
    }

    /// Loss configuration with flag overrides applied and validated.
    pub fn loss_with(&self, a: &LossArgs) -> CliResult<LossConfig> {
        let mut l = self.loss;
        if let Some(v) = a.alpha {
            l.alpha = v;
        }
        if let Some(v) = a.beta {
            l.beta = v;
        }
        if let Some(v) = a.m {
            l.m = v;
        }
        if let Some(v) = a.d {
            l.d = v;
        }
        if let Some(r) = a.reduction {
            l.reduction = match r {
                ReductionArg::Sum => Reduction::Sum,
                ReductionArg::MeanPerPixel => Reduction::MeanPerPixel,
            };
        }
        if let Some(v) = a.epsilon {
            l.epsilon = v;
        }
        l.validate()?;
        Ok(l)
    }
}

pub fn apply_schedule(mut t: TrainConfig, a: &ScheduleArgs) -> CliResult<TrainConfig> {
    if let Some(v) = a.lr {
        t.learning_rate = v;
    }
    if let Some(v) = a.momentum {
        t.momentum = v;
    }
    if let Some(v) = a.warmup {
        t.warmup_epochs = v;
    }
    if let Some(v) = a.epochs {
        t.total_epochs = v;
    }
    t.validate()?;
    Ok(t)
}
