use serde_json::{json, Value};
use starprior::grid::GridShape;
use starprior::synth::gen_dataset;

use crate::args::GenArgs;
use crate::config::RunConfig;
use crate::error::CliResult;

pub fn run(cfg: &RunConfig, a: GenArgs) -> CliResult<Value> {
    let out = cfg.out_dir()?;
    let shape = GridShape::new(a.height, a.width)?;
    let mut params = cfg.dataset.clone();
    if let Some(kind) = &a.kind {
        params.kind = kind.parse()?;
    }
    if let Some(s) = a.noise_sigma {
        params.noise_sigma = s;
    }
    let manifest = gen_dataset(a.n, cfg.seed, shape, &params, &out)?;
    let names: Vec<&str> = manifest.items.iter().map(|i| i.name.as_str()).collect();
    Ok(json!({
        "n": a.n,
        "seed": cfg.seed,
        "height": a.height,
        "width": a.width,
        "params": params,
        "items": names,
    }))
}
