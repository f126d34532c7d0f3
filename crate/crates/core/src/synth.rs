//! Seeded synthetic lesions: star-shaped masks, controlled non-star
//! corruptions and noisy two-level images.
//!
//! All randomness comes from `ChaCha8Rng::seed_from_u64`, which is specified
//! independently of platform and word size. Angles follow the compass
//! convention of [`crate::geometry`]: `φ = atan2(-(row - cr), col - cc)`,
//! counter-clockwise from east.

use std::f64::consts::PI;
use std::fs;
use std::path::Path;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::grid::{Center, Dataset, GridShape, ImageGrid, MaskGrid, Pixel, Sample};
use crate::io::dataset::{image_path, mask_path, IMAGES_DIR, MASKS_DIR};
use crate::io::pnm::{write_image, write_mask};
use crate::scalar::Real;
use crate::starshape::{estimate_center, star_core};

/// Number of channels in generated images.
pub const IMAGE_CHANNELS: usize = 3;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Harmonic {
    pub amplitude: f64,
    pub frequency: u32,
    pub phase: f64,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "kebab-case")]
pub enum ShapeKind {
    /// `dist < r(φ)` with `r(φ) = base_radius + Σ a_k sin(f_k φ + ψ_k)`.
    RadialStar,
    /// Semi-axes `base_radius` along `angle` and `base_radius * aspect` across.
    Ellipse { aspect: f64, angle: f64 },
    /// Disk of `base_radius` minus a disk of `bite_radius` centered at
    /// `center + bite_offset` (`(drow, dcol)`).
    Crescent { bite_radius: f64, bite_offset: (f64, f64) },
    /// Radial star minus a circular sector; see [`wedge_cut`].
    WedgeCutStar { axis: f64, half_angle: f64 },
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ShapeSpec {
    pub kind: ShapeKind,
    pub center: Center,
    pub base_radius: f64,
    pub radial_harmonics: Vec<Harmonic>,
    pub intensity_fg: f64,
    pub intensity_bg: f64,
    pub noise_sigma: f64,
    pub seed: u64,
}

impl ShapeSpec {
    pub fn validate(&self) -> Result<()> {
        if !(self.base_radius >= 2.0) {
            return Err(Error::Validation(format!("base_radius {} < 2", self.base_radius)));
        }
        let amp: f64 = self.radial_harmonics.iter().map(|h| h.amplitude.abs()).sum();
        if amp >= self.base_radius {
            return Err(Error::Validation(format!(
                "harmonic amplitudes sum to {amp}, must stay below base_radius {}",
                self.base_radius
            )));
        }
        if self.radial_harmonics.iter().any(|h| h.frequency < 1) {
            return Err(Error::Validation("harmonic frequencies must be >= 1".into()));
        }
        for (name, v) in [("intensity_fg", self.intensity_fg), ("intensity_bg", self.intensity_bg)] {
            if !(0.0..=1.0).contains(&v) {
                return Err(Error::Validation(format!("{name} {v} outside [0, 1]")));
            }
        }
        if !(self.noise_sigma >= 0.0 && self.noise_sigma.is_finite()) {
            return Err(Error::Validation("noise_sigma must be finite and >= 0".into()));
        }
        match self.kind {
            ShapeKind::Ellipse { aspect, .. } if !(aspect > 0.0) => {
                Err(Error::Validation("ellipse aspect must be positive".into()))
            }
            ShapeKind::Crescent { bite_radius, .. } if !(bite_radius > 0.0) => {
                Err(Error::Validation("crescent bite_radius must be positive".into()))
            }
            ShapeKind::WedgeCutStar { half_angle, .. } if !(half_angle > 0.0 && half_angle < PI / 2.0) => {
                Err(Error::Validation("wedge half_angle must lie in (0, pi/2)".into()))
            }
            _ => Ok(()),
        }
    }

    /// Boundary radius of the radial star at angle `phi`.
    pub fn radius_at(&self, phi: f64) -> f64 {
        self.base_radius
            + self
                .radial_harmonics
                .iter()
                .map(|h| h.amplitude * (h.frequency as f64 * phi + h.phase).sin())
                .sum::<f64>()
    }
}

/// Offset of `p` from `c` as `(x, y)` with y pointing up.
#[inline]
fn planar(p: Pixel, c: Center) -> (f64, f64) {
    (p.col as f64 - c.col as f64, c.row as f64 - p.row as f64)
}

fn radial_star(spec: &ShapeSpec, shape: GridShape) -> Result<MaskGrid> {
    let raw = MaskGrid::from_fn(shape, |p| {
        let (x, y) = planar(p, spec.center);
        let dist = x.hypot(y);
        dist == 0.0 || dist < spec.radius_at(y.atan2(x))
    });
    star_closure(&raw, spec.center)
}

/// Shrinks `mask` until it is star-shaped both with respect to `center` and
/// with respect to its own estimated center.
///
/// Pixel-center sampling of a continuous star-shaped region is not always
/// star-shaped on the grid; thin tips can shadow their neighbours.
pub fn star_closure(mask: &MaskGrid, center: Center) -> Result<MaskGrid> {
    let mut current = star_core(mask, center)?;
    loop {
        let Ok(est) = estimate_center(&current) else { return Ok(current) };
        let next = star_core(&star_core(&current, est)?, center)?;
        if next == current {
            return Ok(current);
        }
        current = next;
    }
}

/// Removes the circular sector whose apex is the point where the ray from
/// `center` along `axis` leaves `mask`, whose radius reaches back to the
/// center and whose half opening angle is `half_angle`. The center itself
/// is kept.
pub fn wedge_cut(mask: &MaskGrid, center: Center, axis: f64, half_angle: f64) -> MaskGrid {
    let shape = mask.shape();
    let (ux, uy) = (axis.cos(), axis.sin());
    let mut reach = 0.0;
    let mut t = 0.0;
    loop {
        t += 0.25;
        let row = (center.row as f64 - t * uy).round();
        let col = (center.col as f64 + t * ux).round();
        if row < 0.0 || col < 0.0 || !shape.contains(Pixel::new(row as usize, col as usize)) {
            break;
        }
        if !mask.get(Pixel::new(row as usize, col as usize)) {
            break;
        }
        reach = t;
    }
    let (ax, ay) = (reach * ux, reach * uy);
    let cos_h = half_angle.cos();
    MaskGrid::from_fn(shape, |p| {
        if !mask.get(p) {
            return false;
        }
        if p == center {
            return true;
        }
        let (x, y) = planar(p, center);
        let (dx, dy) = (x - ax, y - ay);
        let d = dx.hypot(dy);
        if d >= reach || d == 0.0 {
            return d != 0.0 || reach == 0.0;
        }
        // Angle between (p - apex) and (center - apex) = -u.
        let cos = (-dx * ux - dy * uy) / d;
        cos <= cos_h
    })
}

pub fn gen_mask(spec: &ShapeSpec, shape: GridShape) -> Result<MaskGrid> {
    spec.validate()?;
    shape.ensure_contains(spec.center)?;
    let c = spec.center;
    match spec.kind {
        ShapeKind::RadialStar => radial_star(spec, shape),
        ShapeKind::Ellipse { aspect, angle } => {
            let (ca, sa) = (angle.cos(), angle.sin());
            let (a, b) = (spec.base_radius, spec.base_radius * aspect);
            let raw = MaskGrid::from_fn(shape, |p| {
                let (x, y) = planar(p, c);
                let u = x * ca + y * sa;
                let v = -x * sa + y * ca;
                (u / a).powi(2) + (v / b).powi(2) < 1.0 || p == c
            });
            star_core(&raw, c)
        }
        ShapeKind::Crescent { bite_radius, bite_offset } => {
            let (br, bc) = (c.row as f64 + bite_offset.0, c.col as f64 + bite_offset.1);
            Ok(MaskGrid::from_fn(shape, |p| {
                let (x, y) = planar(p, c);
                let inside = x.hypot(y) < spec.base_radius;
                let bitten = (p.row as f64 - br).hypot(p.col as f64 - bc) < bite_radius;
                inside && !bitten
            }))
        }
        ShapeKind::WedgeCutStar { axis, half_angle } => {
            let star = radial_star(spec, shape)?;
            Ok(wedge_cut(&star, c, axis, half_angle))
        }
    }
}

/// Two-level image with independent Gaussian noise per channel, clamped to
/// `[0, 1]`. Samples are drawn channel-major in row-major pixel order.
pub fn gen_image<T: Real>(mask: &MaskGrid, spec: &ShapeSpec) -> Result<ImageGrid<T>> {
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    let n = mask.shape().len();
    let mut data = Vec::with_capacity(IMAGE_CHANNELS * n);
    for _ in 0..IMAGE_CHANNELS {
        for &l in mask.labels() {
            let level = if l == 1 { spec.intensity_fg } else { spec.intensity_bg };
            let noise =
                if spec.noise_sigma > 0.0 { spec.noise_sigma * rng.sample::<f64, _>(StandardNormal) } else { 0.0 };
            data.push(T::of((level + noise).clamp(0.0, 1.0)));
        }
    }
    ImageGrid::new(mask.shape(), IMAGE_CHANNELS, data)
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum KindChoice {
    #[default]
    RadialStar,
    Ellipse,
    Crescent,
    WedgeCutStar,
}

impl std::str::FromStr for KindChoice {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "radial-star" => Ok(KindChoice::RadialStar),
            "ellipse" => Ok(KindChoice::Ellipse),
            "crescent" => Ok(KindChoice::Crescent),
            "wedge-cut-star" => Ok(KindChoice::WedgeCutStar),
            _ => Err(Error::config("kind", format!("unknown shape kind `{s}`"))),
        }
    }
}

/// Distribution of random shape specs.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct DatasetParams {
    pub kind: KindChoice,
    /// Base radius range as fractions of the shorter grid side.
    pub radius_fraction: (f64, f64),
    pub harmonics: usize,
    /// Upper bound of `Σ |a_k| / base_radius`.
    pub amplitude_fraction: f64,
    pub max_frequency: u32,
    pub intensity_fg: f64,
    pub intensity_bg: f64,
    pub noise_sigma: f64,
}

impl Default for DatasetParams {
    fn default() -> Self {
        DatasetParams {
            kind: KindChoice::RadialStar,
            radius_fraction: (0.2, 0.32),
            harmonics: 2,
            amplitude_fraction: 0.25,
            max_frequency: 5,
            intensity_fg: 0.75,
            intensity_bg: 0.3,
            noise_sigma: 0.08,
        }
    }
}

/// Draws one shape spec from `params`.
pub fn random_spec(params: &DatasetParams, shape: GridShape, seed: u64) -> Result<ShapeSpec> {
    let (lo, hi) = params.radius_fraction;
    if !(lo > 0.0 && hi >= lo && params.amplitude_fraction >= 0.0 && params.amplitude_fraction < 1.0) {
        return Err(Error::config("radius_fraction", "need 0 < lo <= hi and amplitude_fraction in [0, 1)"));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let side = shape.height().min(shape.width()) as f64;
    let radius = (side * rng.random_range(lo..=hi)).max(2.0);
    let budget = radius * params.amplitude_fraction;
    let mut harmonics = Vec::with_capacity(params.harmonics);
    let weights: Vec<f64> = (0..params.harmonics).map(|_| rng.random_range(0.2..1.0)).collect();
    let wsum: f64 = weights.iter().sum();
    for w in weights {
        harmonics.push(Harmonic {
            amplitude: 0.999 * budget * w / wsum * rng.random_range(0.5..1.0),
            frequency: rng.random_range(2..=params.max_frequency.max(2)),
            phase: rng.random_range(0.0..2.0 * PI),
        });
    }
    let reach = radius + budget + 1.0;
    let pick = |rng: &mut ChaCha8Rng, n: usize| -> usize {
        let lo = reach.ceil() as i64;
        let hi = n as i64 - 1 - lo;
        if hi > lo {
            rng.random_range(lo..=hi) as usize
        } else {
            n / 2
        }
    };
    let center = Pixel::new(pick(&mut rng, shape.height()), pick(&mut rng, shape.width()));
    let kind = match params.kind {
        KindChoice::RadialStar => ShapeKind::RadialStar,
        KindChoice::Ellipse => {
            harmonics.clear();
            ShapeKind::Ellipse { aspect: rng.random_range(0.5..1.0), angle: rng.random_range(0.0..PI) }
        }
        KindChoice::Crescent => {
            harmonics.clear();
            let off = radius * rng.random_range(0.45..0.7);
            let ang = rng.random_range(0.0..2.0 * PI);
            ShapeKind::Crescent {
                bite_radius: radius * rng.random_range(0.6..0.85),
                bite_offset: (-off * ang.sin(), off * ang.cos()),
            }
        }
        KindChoice::WedgeCutStar => {
            ShapeKind::WedgeCutStar { axis: rng.random_range(0.0..2.0 * PI), half_angle: rng.random_range(0.25..0.45) }
        }
    };
    Ok(ShapeSpec {
        kind,
        center,
        base_radius: radius,
        radial_harmonics: harmonics,
        intensity_fg: params.intensity_fg,
        intensity_bg: params.intensity_bg,
        noise_sigma: params.noise_sigma,
        seed,
    })
}

pub fn gen_sample<T: Real>(name: impl Into<String>, spec: &ShapeSpec, shape: GridShape) -> Result<Sample<T>> {
    let mask = gen_mask(spec, shape)?;
    let image = gen_image(&mask, spec)?;
    Ok(Sample { name: name.into(), image, mask })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ManifestItem {
    pub name: String,
    pub spec: ShapeSpec,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct Manifest {
    pub items: Vec<ManifestItem>,
}

pub const MANIFEST_FILE: &str = "manifest.json";

pub fn item_name(i: usize) -> String {
    format!("item_{i:04}")
}

/// Specs and names of an `n`-item dataset; item `i` uses seed `base_seed + i`.
pub fn dataset_manifest(n: usize, base_seed: u64, shape: GridShape, params: &DatasetParams) -> Result<Manifest> {
    let items = (0..n)
        .map(|i| {
            let spec = random_spec(params, shape, base_seed.wrapping_add(i as u64))?;
            Ok(ManifestItem { name: item_name(i), spec })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(Manifest { items })
}

/// Generates an in-memory dataset (at least one item).
pub fn gen_dataset_in_memory<T: Real>(
    n: usize,
    base_seed: u64,
    shape: GridShape,
    params: &DatasetParams,
) -> Result<Dataset<T>> {
    let manifest = dataset_manifest(n, base_seed, shape, params)?;
    let items =
        manifest.items.iter().map(|it| gen_sample(it.name.clone(), &it.spec, shape)).collect::<Result<Vec<_>>>()?;
    Dataset::new(items)
}

/// Writes `images/`, `masks/` and `manifest.json` under `out_dir`.
pub fn gen_dataset(
    n: usize,
    base_seed: u64,
    shape: GridShape,
    params: &DatasetParams,
    out_dir: impl AsRef<Path>,
) -> Result<Manifest> {
    let root = out_dir.as_ref();
    for sub in [IMAGES_DIR, MASKS_DIR] {
        let d = root.join(sub);
        fs::create_dir_all(&d).map_err(|e| Error::io(&d, e))?;
    }
    let manifest = dataset_manifest(n, base_seed, shape, params)?;
    for it in &manifest.items {
        let sample: Sample<f64> = gen_sample(it.name.clone(), &it.spec, shape)?;
        write_image(&sample.image, image_path(root, &it.name))?;
        write_mask(&sample.mask, mask_path(root, &it.name))?;
    }
    let path = root.join(MANIFEST_FILE);
    let mut json = serde_json::to_string_pretty(&manifest).expect("manifest serializes");
    json.push('\n');
    fs::write(&path, json).map_err(|e| Error::io(&path, e))?;
    Ok(manifest)
}
