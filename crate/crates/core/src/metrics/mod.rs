//! Overlap metrics and paired significance testing.

mod confusion;
pub mod wilcoxon;

pub use confusion::{confusion, jaccard, mean_report, metrics, threshold, ConfusionCounts, MetricReport};
pub use wilcoxon::{wilcoxon_signed_rank, Method, WilcoxonResult};
