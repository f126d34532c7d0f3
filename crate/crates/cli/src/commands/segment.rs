use std::f64::consts::PI;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde_json::{json, Value};
use starprior::io::{read_mask, read_mask_dir, write_mask, write_probmap};
use starprior::loss::combined_loss;
use starprior::metrics::{jaccard, threshold};
use starprior::segmenter::{optimize_logits_with_center, LogitField};
use starprior::starshape::{estimate_center, violation_stats};
use starprior::synth::wedge_cut;

use crate::args::SegmentArgs;
use crate::config::{apply_schedule, RunConfig};
use crate::error::{CliError, CliResult};
use crate::util::{create_dir, require_same_shape};

/// For every supervising mask: build the initial mask (from `--init` or a
/// seeded wedge cut), optimize `±kappa` logits against the mask and write
/// `init/`, `probs/` and `masks/` under the output directory.
pub fn run(cfg: &RunConfig, a: SegmentArgs) -> CliResult<Value> {
    let out = cfg.out_dir()?;
    let loss = cfg.loss_with(&a.loss)?;
    let schedule = apply_schedule(cfg.segment.schedule.clone(), &a.schedule)?;
    let kappa = a.kappa.unwrap_or(cfg.segment.kappa);
    let half_angle = a.half_angle.unwrap_or(cfg.segment.half_angle);
    if !(kappa > 0.0 && kappa.is_finite()) {
        return Err(CliError::usage("--kappa must be positive"));
    }
    if !(half_angle > 0.0 && half_angle < PI / 2.0) {
        return Err(CliError::usage("--half-angle must lie in (0, pi/2)"));
    }
    let masks = read_mask_dir(&a.masks)?;
    let (init_dir, probs_dir, masks_dir) = (out.join("init"), out.join("probs"), out.join("masks"));
    for d in [&init_dir, &probs_dir, &masks_dir] {
        create_dir(d)?;
    }
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let mut items = Vec::with_capacity(masks.len());
    for (name, y) in &masks {
        let center = estimate_center(y)?;
        let axis: f64 = rng.random_range(0.0..2.0 * PI);
        let init_mask = match &a.init {
            Some(dir) => {
                let m = read_mask(dir.join(format!("{name}.pgm")))?;
                require_same_shape(y, &m)?;
                m
            }
            None => wedge_cut(y, center, axis, half_angle),
        };
        let init = LogitField::from_mask(&init_mask, kappa);
        let (field, trace) = optimize_logits_with_center(y, center, &init, &loss, &schedule)?;
        let pm = field.probs();
        let pred = threshold(&pm, 0.5);
        write_mask(&init_mask, init_dir.join(format!("{name}.pgm")))?;
        write_probmap(&pm, probs_dir.join(format!("{name}.spf")))?;
        write_mask(&pred, masks_dir.join(format!("{name}.pgm")))?;
        let stats = violation_stats(&pred, center)?;
        let last = combined_loss(&pm, y, center, &loss, &loss.rays(center, y.shape())?)?;
        items.push(json!({
            "name": name,
            "center": [center.row, center.col],
            "steps": trace.len(),
            "final": { "total": last.total, "ce": last.ce, "sh": last.sh },
            "init_jaccard": jaccard(&init_mask, y)?,
            "jaccard": jaccard(&pred, y)?,
            "violation_fraction": stats.fraction,
        }));
    }
    Ok(json!({ "items": items }))
}
