use serde_json::{json, Value};
use starprior::grid::Dataset;
use starprior::io::{normalize_dataset, read_dataset, write_mask};
use starprior::metrics::threshold;
use starprior::segmenter::{extract_features, predict, train};

use crate::args::TrainCmdArgs;
use crate::config::{apply_schedule, RunConfig};
use crate::error::{CliError, CliResult};
use crate::util::{create_dir, write_file};

/// Trains on `--data` and writes `model.json`, `train_log.jsonl` and
/// thresholded validation predictions in `val_pred/`.
pub fn run(cfg: &RunConfig, a: TrainCmdArgs) -> CliResult<Value> {
    let out = cfg.out_dir()?;
    let loss = cfg.loss_with(&a.loss)?;
    let mut tcfg = apply_schedule(cfg.train.clone(), &a.schedule)?;
    if let Some(v) = a.weight_decay {
        tcfg.weight_decay = v;
    }
    if let Some(v) = a.batch_size {
        tcfg.batch_size = v;
    }
    if let Some(v) = a.lr_drop_factor {
        tcfg.lr_drop_factor = v;
    }
    if let Some(v) = a.patience {
        tcfg.patience = v;
    }
    tcfg.validate()?;

    let data: Dataset<f64> = read_dataset(&a.data)?;
    let (train_set, val_set) = match &a.val {
        Some(dir) => (data, read_dataset(dir)?),
        None => {
            if !(a.val_fraction > 0.0 && a.val_fraction < 1.0) {
                return Err(CliError::usage("--val-fraction must lie in (0, 1)"));
            }
            let n = data.len();
            let n_val = ((n as f64 * a.val_fraction).ceil() as usize).max(1);
            if n_val >= n {
                return Err(CliError::usage(format!("cannot hold out {n_val} of {n} items for validation")));
            }
            let mut items = data.into_items();
            let val = items.split_off(n - n_val);
            (Dataset::new(items)?, Dataset::new(val)?)
        }
    };
    let (train_norm, stats) = normalize_dataset(&train_set)?;
    let val_norm = stats.apply(&val_set)?;
    let (params, log) = train(&train_norm, &val_norm, &loss, &tcfg)?;

    create_dir(&out)?;
    let model = json!({ "weights": params.weights, "bias": params.bias, "channel_stats": stats });
    let mut model_text = serde_json::to_string_pretty(&model).expect("model serializes");
    model_text.push('\n');
    write_file(&out.join("model.json"), model_text.as_bytes())?;
    let mut lines = String::new();
    for rec in &log {
        lines.push_str(&serde_json::to_string(rec).expect("log serializes"));
        lines.push('\n');
    }
    write_file(&out.join("train_log.jsonl"), lines.as_bytes())?;
    let pred_dir = out.join("val_pred");
    create_dir(&pred_dir)?;
    for s in val_norm.items() {
        let pm = predict(&params, &extract_features(&s.image))?;
        write_mask(&threshold(&pm, 0.5), pred_dir.join(format!("{}.pgm", s.name)))?;
    }

    let lr_drops = log.windows(2).filter(|w| w[1].lr < w[0].lr).count();
    let best = log.iter().map(|r| r.val_jaccard).fold(f64::NEG_INFINITY, f64::max);
    Ok(json!({
        "epochs": log.len(),
        "train_items": train_norm.len(),
        "val_items": val_norm.len(),
        "final_val_jaccard": log.last().map(|r| r.val_jaccard),
        "best_val_jaccard": best,
        "lr_drops": lr_drops,
        "final_lr": log.last().map(|r| r.lr),
    }))
}
