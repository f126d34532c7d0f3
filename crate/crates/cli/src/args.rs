use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};

#[derive(Debug, Parser)]
#[command(
    name = "starprior",
    version,
    about = "Star-shape prior loss: data generation, analysis, optimization and evaluation"
)]
pub struct Cli {
    #[command(flatten)]
    pub global: GlobalArgs,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Args)]
pub struct GlobalArgs {
    /// Seed for every random choice of the run.
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    /// JSON run configuration; flags override its values.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    /// Directory receiving generated files.
    #[arg(long, global = true)]
    pub out_dir: Option<PathBuf>,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Generate a synthetic dataset (images/, masks/, manifest.json).
    Gen(GenArgs),
    /// Star-convexity violation statistics of masks.
    Check(CheckArgs),
    /// Evaluate the combined loss of a prediction.
    Loss(LossCmdArgs),
    /// Compare analytic gradients with central differences.
    Gradcheck(GradcheckArgs),
    /// Optimize logit fields directly against the loss.
    Segment(SegmentArgs),
    /// Train the pixelwise logistic model.
    Train(TrainCmdArgs),
    /// Overlap metrics of predictions, optionally with a paired test.
    Eval(EvalArgs),
    /// Render contours and violations as a PPM overlay.
    Render(RenderArgs),
}

#[derive(Debug, Default, Args)]
pub struct LossArgs {
    #[arg(long)]
    pub alpha: Option<f64>,
    #[arg(long)]
    pub beta: Option<f64>,
    /// Samples per ray.
    #[arg(long)]
    pub m: Option<usize>,
    /// Number of ray directions (4 or 8).
    #[arg(long)]
    pub d: Option<usize>,
    #[arg(long, value_enum)]
    pub reduction: Option<ReductionArg>,
    #[arg(long)]
    pub epsilon: Option<f64>,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum ReductionArg {
    Sum,
    MeanPerPixel,
}

#[derive(Debug, Default, Args)]
pub struct ScheduleArgs {
    #[arg(long)]
    pub lr: Option<f64>,
    #[arg(long)]
    pub momentum: Option<f64>,
    /// Leading epochs (steps for `segment`) with the star term disabled.
    #[arg(long)]
    pub warmup: Option<usize>,
    /// Total epochs (steps for `segment`).
    #[arg(long)]
    pub epochs: Option<usize>,
}

#[derive(Debug, Args)]
pub struct GenArgs {
    #[arg(long, default_value_t = 10)]
    pub n: usize,
    #[arg(long, default_value_t = 64)]
    pub height: usize,
    #[arg(long, default_value_t = 64)]
    pub width: usize,
    /// radial-star, ellipse, crescent or wedge-cut-star.
    #[arg(long)]
    pub kind: Option<String>,
    #[arg(long)]
    pub noise_sigma: Option<f64>,
}

#[derive(Debug, Args)]
pub struct CheckArgs {
    /// Directory of PGM masks; each is judged against its estimated center.
    #[arg(long, conflicts_with = "mask")]
    pub masks: Option<PathBuf>,
    /// A single PGM mask.
    #[arg(long)]
    pub mask: Option<PathBuf>,
    /// Center `row,col` for a single mask.
    #[arg(long, requires = "mask")]
    pub center: Option<String>,
    /// Write a violation overlay PPM for a single mask.
    #[arg(long, requires = "mask")]
    pub overlay: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct LossCmdArgs {
    /// Prediction: SPF probability map or PGM mask.
    #[arg(long)]
    pub pred: PathBuf,
    /// Ground-truth PGM mask.
    #[arg(long)]
    pub mask: PathBuf,
    /// Center `row,col`; defaults to the estimated center of the mask.
    #[arg(long)]
    pub center: Option<String>,
    #[command(flatten)]
    pub loss: LossArgs,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum GradTarget {
    Prob,
    Logit,
    Both,
}

#[derive(Debug, Args)]
pub struct GradcheckArgs {
    /// Side of the square test grid.
    #[arg(long, default_value_t = 16)]
    pub size: usize,
    /// Finite-difference step.
    #[arg(long, default_value_t = 1e-4)]
    pub h: f64,
    #[arg(long, value_enum, default_value = "both")]
    pub target: GradTarget,
    #[command(flatten)]
    pub loss: LossArgs,
}

#[derive(Debug, Args)]
pub struct SegmentArgs {
    /// Directory of supervising PGM masks.
    #[arg(long)]
    pub masks: PathBuf,
    /// Directory of initial PGM masks; by default each mask is corrupted by
    /// a seeded wedge cut.
    #[arg(long)]
    pub init: Option<PathBuf>,
    /// Logit magnitude of the initial field.
    #[arg(long)]
    pub kappa: Option<f64>,
    /// Half opening angle of the default wedge corruption, in radians.
    #[arg(long)]
    pub half_angle: Option<f64>,
    #[command(flatten)]
    pub schedule: ScheduleArgs,
    #[command(flatten)]
    pub loss: LossArgs,
}

#[derive(Debug, Args)]
pub struct TrainCmdArgs {
    /// Training dataset directory (images/, masks/).
    #[arg(long)]
    pub data: PathBuf,
    /// Validation dataset; by default the last items of `--data` are held out.
    #[arg(long)]
    pub val: Option<PathBuf>,
    #[arg(long, default_value_t = 0.2)]
    pub val_fraction: f64,
    #[arg(long)]
    pub weight_decay: Option<f64>,
    #[arg(long)]
    pub batch_size: Option<usize>,
    #[arg(long)]
    pub lr_drop_factor: Option<f64>,
    #[arg(long)]
    pub patience: Option<usize>,
    #[command(flatten)]
    pub schedule: ScheduleArgs,
    #[command(flatten)]
    pub loss: LossArgs,
}

#[derive(Debug, Args)]
pub struct EvalArgs {
    /// Predictions: `<name>.spf` or `<name>.pgm` per truth mask.
    #[arg(long)]
    pub pred: PathBuf,
    /// Ground-truth PGM masks.
    #[arg(long)]
    pub truth: PathBuf,
    /// Second prediction directory for a paired Wilcoxon test on Jaccard.
    #[arg(long)]
    pub baseline: Option<PathBuf>,
    #[arg(long, default_value_t = 0.5)]
    pub threshold: f64,
}

#[derive(Debug, Args)]
pub struct RenderArgs {
    /// Prediction: SPF probability map or PGM mask.
    #[arg(long)]
    pub pred: PathBuf,
    /// Ground-truth PGM mask.
    #[arg(long)]
    pub truth: PathBuf,
    /// Background image (PPM or PGM); black when absent.
    #[arg(long)]
    pub image: Option<PathBuf>,
    /// Center `row,col` for the violation layer; defaults to the estimated
    /// center of the thresholded prediction.
    #[arg(long)]
    pub center: Option<String>,
    #[arg(long, default_value_t = 0.5)]
    pub threshold: f64,
    /// Output PPM; defaults to `<out-dir>/overlay.ppm`.
    #[arg(long)]
    pub out: Option<PathBuf>,
}
