//! Star-shape prior for binary segmentation.
//!
//! The crate provides raster containers and file formats, discrete ray
//! geometry, an exact star-convexity checker, the cross-entropy plus
//! star-shape loss with analytic gradients, two loss consumers (direct
//! logit optimization and a trainable pixelwise logistic model), a seeded
//! synthetic data generator and evaluation metrics.
//!
//! Numeric code is generic over [`Real`] (`f32` or `f64`); the aliases below
//! fix the common `f64` instantiations.

pub mod error;
pub mod geometry;
pub mod grid;
pub mod io;
pub mod loss;
pub mod metrics;
pub mod scalar;
pub mod segmenter;
pub mod starshape;
pub mod synth;

pub use error::{Error, Result};
pub use geometry::{all_ray_samples, quantize_direction, ray_samples, DirectionSet, RaySample, RayTable};
pub use grid::{Center, Dataset, GridShape, ImageGrid, MaskGrid, Pixel, ProbMap, Sample};
pub use loss::{
    ce_loss, combined_loss, grad_logit, grad_prob, sh_loss, sh_loss_bruteforce, GradField, LossConfig, LossReport,
    Reduction,
};
pub use metrics::{confusion, metrics, threshold, wilcoxon_signed_rank, ConfusionCounts, MetricReport};
pub use scalar::Real;
pub use segmenter::{extract_features, optimize_logits, predict, train, LogitField, ParamVector, TrainConfig};
pub use starshape::{check_star, dataset_violation_stats, estimate_center, ViolationMap, ViolationStats};
pub use synth::{gen_dataset, gen_image, gen_mask, ShapeKind, ShapeSpec};

pub type ImageGridF32 = ImageGrid<f32>;
pub type ImageGridF64 = ImageGrid<f64>;
pub type ProbMapF32 = ProbMap<f32>;
pub type ProbMapF64 = ProbMap<f64>;
pub type DatasetF32 = Dataset<f32>;
pub type DatasetF64 = Dataset<f64>;
pub type LossReportF32 = LossReport<f32>;
pub type LossReportF64 = LossReport<f64>;
pub type GradFieldF32 = GradField<f32>;
pub type GradFieldF64 = GradField<f64>;
pub type LogitFieldF32 = LogitField<f32>;
pub type LogitFieldF64 = LogitField<f64>;
pub type ParamVectorF64 = ParamVector<f64>;
