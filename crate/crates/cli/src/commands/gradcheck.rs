use serde_json::{json, Value};
use starprior::grid::GridShape;
use starprior::loss::gradcheck::{check_logit_gradient, check_prob_gradient, random_kink_free_instance};

use crate::args::{GradTarget, GradcheckArgs};
use crate::config::RunConfig;
use crate::error::{CliError, CliResult};

pub fn run(cfg: &RunConfig, a: GradcheckArgs) -> CliResult<Value> {
    let loss = cfg.loss_with(&a.loss)?;
    if !(a.h > 0.0 && a.h < 0.01) {
        return Err(CliError::usage("--h must lie in (0, 0.01)"));
    }
    let inst = random_kink_free_instance(GridShape::new(a.size, a.size)?, &loss, cfg.seed)?;
    let mut reports = Vec::new();
    if matches!(a.target, GradTarget::Prob | GradTarget::Both) {
        reports.push(check_prob_gradient(&inst, &loss, a.h)?);
    }
    if matches!(a.target, GradTarget::Logit | GradTarget::Both) {
        reports.push(check_logit_gradient(&inst, &loss, a.h)?);
    }
    let worst = reports
        .into_iter()
        .reduce(|x, y| if y.max_rel_err > x.max_rel_err { y } else { x })
        .expect("at least one target");
    Ok(json!({
        "max_rel_err": worst.max_rel_err,
        "worst_pixel": [worst.worst_pixel.row, worst.worst_pixel.col],
    }))
}
