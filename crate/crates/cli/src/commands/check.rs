use serde_json::{json, Value};
use starprior::io::{pnm, read_mask, read_mask_dir};
use starprior::starshape::{check_star, dataset_violation_stats, estimate_center, violation_stats};

use crate::args::CheckArgs;
use crate::config::RunConfig;
use crate::error::{CliError, CliResult};
use crate::util::{parse_center, write_file};

pub fn run(_cfg: &RunConfig, a: CheckArgs) -> CliResult<Value> {
    let stats = match (&a.masks, &a.mask) {
        (Some(dir), None) => {
            let masks = read_mask_dir(dir)?;
            let stats = dataset_violation_stats(masks.iter().map(|(_, m)| m));
            if stats.empty_masks > 0 {
                eprintln!("skipped {} mask(s) without foreground", stats.empty_masks);
            }
            stats
        }
        (None, Some(path)) => {
            let mask = read_mask(path)?;
            let center = match &a.center {
                Some(s) => parse_center(s)?,
                None => estimate_center(&mask)?,
            };
            if let Some(out) = &a.overlay {
                let flags = check_star(&mask, center)?.into_mask();
                let mut data = Vec::with_capacity(3 * mask.shape().len());
                for (&fg, &bad) in mask.labels().iter().zip(flags.labels()) {
                    data.extend_from_slice(match (fg, bad) {
                        (_, 1) => &[0, 0, 255],
                        (1, _) => &[255, 255, 255],
                        _ => &[0, 0, 0],
                    });
                }
                let bytes = pnm::encode_pnm(&pnm::Pnm { shape: mask.shape(), channels: 3, samples: data })?;
                write_file(out, &bytes)?;
            }
            violation_stats(&mask, center)?
        }
        _ => return Err(CliError::usage("exactly one of --masks or --mask is required")),
    };
    Ok(json!({
        "violating": stats.violating,
        "foreground": stats.foreground,
        "fraction": stats.fraction,
    }))
}
