use std::path::Path;

use serde_json::{json, Value};
use starprior::io::dataset::list_stems;
use starprior::io::read_mask;
use starprior::metrics::{confusion, mean_report, metrics, threshold, wilcoxon_signed_rank, MetricReport};
use starprior::Error;

use crate::args::EvalArgs;
use crate::config::RunConfig;
use crate::error::{CliError, CliResult};
use crate::util::{find_prediction, load_probmap, require_same_shape};

/// Prediction stems in `dir` (`.spf` and `.pgm`), sorted and deduplicated.
fn prediction_stems(dir: &Path) -> CliResult<Vec<String>> {
    let mut stems = list_stems(dir, "spf")?;
    stems.extend(list_stems(dir, "pgm")?);
    stems.sort();
    stems.dedup();
    Ok(stems)
}

fn score(dir: &Path, truth_dir: &Path, names: &[String], t: f64) -> CliResult<Vec<MetricReport<f64>>> {
    names
        .iter()
        .map(|name| {
            let truth = read_mask(truth_dir.join(format!("{name}.pgm")))?;
            let pred = threshold(&load_probmap(&find_prediction(dir, name)?)?, t);
            require_same_shape(&truth, &pred)?;
            Ok(metrics(&confusion(&pred, &truth)?))
        })
        .collect()
}

pub fn run(_cfg: &RunConfig, a: EvalArgs) -> CliResult<Value> {
    if !(0.0..=1.0).contains(&a.threshold) {
        return Err(CliError::usage("--threshold must lie in [0, 1]"));
    }
    let names = prediction_stems(&a.pred)?;
    if names.is_empty() {
        return Err(CliError::Data(starprior::Error::Validation(format!("no predictions in {}", a.pred.display()))));
    }
    let reports = score(&a.pred, &a.truth, &names, a.threshold)?;
    let images: Vec<Value> = names
        .iter()
        .zip(&reports)
        .map(|(n, r)| {
            json!({
                "name": n,
                "jaccard": r.jaccard,
                "dice": r.dice,
                "accuracy": r.accuracy,
                "specificity": r.specificity,
                "sensitivity": r.sensitivity,
            })
        })
        .collect();
    let paired = match &a.baseline {
        Some(dir) => {
            let base = score(dir, &a.truth, &names, a.threshold)?;
            let ja: Vec<f64> = reports.iter().map(|r| r.jaccard).collect();
            let jb: Vec<f64> = base.iter().map(|r| r.jaccard).collect();
            let baseline_mean = mean_report(&base).jaccard;
            match wilcoxon_signed_rank(&ja, &jb) {
                Ok(w) => json!({
                    "metric": "jaccard",
                    "baseline_mean": baseline_mean,
                    "statistic": w.statistic,
                    "w_plus": w.w_plus,
                    "w_minus": w.w_minus,
                    "p_value": w.p_value,
                    "method": w.method,
                    "n": w.n,
                }),
                Err(Error::InsufficientPairs(n)) => {
                    eprintln!("paired test skipped: only {n} nonzero differences");
                    json!({
                        "metric": "jaccard",
                        "baseline_mean": baseline_mean,
                        "statistic": null,
                        "w_plus": null,
                        "w_minus": null,
                        "p_value": null,
                        "method": null,
                        "n": n,
                    })
                }
                Err(e) => return Err(e.into()),
            }
        }
        None => Value::Null,
    };
    Ok(json!({
        "images": images,
        "mean": mean_report(&reports),
        "paired_test": paired,
    }))
}
