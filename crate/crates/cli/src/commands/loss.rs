use serde_json::Value;
use starprior::io::read_mask;
use starprior::loss::combined_loss;
use starprior::starshape::estimate_center;

use crate::args::LossCmdArgs;
use crate::config::RunConfig;
use crate::error::CliResult;
use crate::util::{load_probmap, parse_center, report_json};

pub fn run(cfg: &RunConfig, a: LossCmdArgs) -> CliResult<Value> {
    let loss = cfg.loss_with(&a.loss)?;
    let pm = load_probmap(&a.pred)?;
    let y = read_mask(&a.mask)?;
    let center = match &a.center {
        Some(s) => parse_center(s)?,
        None => estimate_center(&y)?,
    };
    let rays = loss.rays(center, y.shape())?;
    let report = combined_loss(&pm, &y, center, &loss, &rays)?;
    Ok(report_json(&report))
}
