use serde_json::{json, Value};
use starprior::grid::{ImageGrid, MaskGrid};
use starprior::io::{pnm, read_image, read_mask};
use starprior::metrics::threshold;
use starprior::starshape::{check_star, estimate_center};

use crate::args::RenderArgs;
use crate::config::RunConfig;
use crate::error::{CliError, CliResult};
use crate::util::{load_probmap, parse_center, require_same_shape, write_file};

/// RGB overlay. Pixels on a layer start from black and light the channels of
/// their layers: red for the prediction contour, green for the truth
/// contour, blue for star violations of the prediction. Other pixels show
/// the image (gray for one channel) or black.
pub fn overlay(pred: &MaskGrid, truth: &MaskGrid, violations: &MaskGrid, image: Option<&ImageGrid<f64>>) -> Vec<u8> {
    let red = pred.contour(true);
    let green = truth.contour(true);
    let shape = pred.shape();
    let mut out = Vec::with_capacity(3 * shape.len());
    for (i, p) in shape.pixels().enumerate() {
        let layers = [red.label(i), green.label(i), violations.label(i)];
        if layers.contains(&1) {
            out.extend(layers.map(|l| if l == 1 { 255 } else { 0 }));
        } else {
            match image {
                Some(img) => {
                    for c in 0..3 {
                        out.push(pnm::quantize(img.get(c.min(img.channels() - 1), p)));
                    }
                }
                None => out.extend([0, 0, 0]),
            }
        }
    }
    out
}

pub fn run(cfg: &RunConfig, a: RenderArgs) -> CliResult<Value> {
    let truth = read_mask(&a.truth)?;
    let pred = threshold(&load_probmap(&a.pred)?, a.threshold);
    require_same_shape(&truth, &pred)?;
    let image = match &a.image {
        Some(p) => {
            let img: ImageGrid<f64> = read_image(p)?;
            if img.shape() != truth.shape() {
                return Err(CliError::Data(starprior::Error::ShapeMismatch {
                    expected: truth.shape(),
                    actual: img.shape(),
                }));
            }
            Some(img)
        }
        None => None,
    };
    let center = match &a.center {
        Some(s) => Some(parse_center(s)?),
        None => estimate_center(&pred).ok(),
    };
    let violations = match center {
        Some(c) => check_star(&pred, c)?.into_mask(),
        None => MaskGrid::empty(pred.shape()),
    };
    let out = match &a.out {
        Some(p) => p.clone(),
        None => cfg.out_dir()?.join("overlay.ppm"),
    };
    let samples = overlay(&pred, &truth, &violations, image.as_ref());
    let bytes = pnm::encode_pnm(&pnm::Pnm { shape: pred.shape(), channels: 3, samples })?;
    write_file(&out, &bytes)?;
    Ok(json!({
        "pred_contour": pred.contour(true).count_foreground(),
        "truth_contour": truth.contour(true).count_foreground(),
        "violations": violations.count_foreground(),
        "center": center.map(|c| [c.row, c.col]),
    }))
}
