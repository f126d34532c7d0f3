//! Consumers of the loss: direct optimization of a logit field and a
//! pixelwise logistic model trained with SGD.

mod config;
mod features;
mod model;
mod train;
mod variational;

pub use config::TrainConfig;
pub use features::{box_blur, extract_features, feature_dim, reflect_index, FeatureStack, BLUR_RADII};
pub use model::{logits, predict, ParamVector};
pub use train::{evaluate_params, sgd_step, train, EpochLog, Velocity};
pub use variational::{
    optimize_logits, optimize_logits_with_center, LogitField, DEFAULT_LOGIT_MAGNITUDE, DIVERGENCE_LIMIT,
};
