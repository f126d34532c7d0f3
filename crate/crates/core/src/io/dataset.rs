//! Dataset directory layout: `images/<name>.ppm` paired with `masks/<name>.pgm`.

use std::fs;
use std::path::{Path, PathBuf};

use crate::error::{Error, Result};
use crate::grid::{Dataset, MaskGrid, Sample};
use crate::io::pnm::{read_image, read_mask, write_image, write_mask};
use crate::scalar::Real;

pub const IMAGES_DIR: &str = "images";
pub const MASKS_DIR: &str = "masks";

/// Sorted file stems in `dir` with the given extension.
pub fn list_stems(dir: &Path, ext: &str) -> Result<Vec<String>> {
    let entries = fs::read_dir(dir).map_err(|e| Error::io(dir, e))?;
    let mut stems = Vec::new();
    for entry in entries {
        let path = entry.map_err(|e| Error::io(dir, e))?.path();
        if path.extension().and_then(|e| e.to_str()) == Some(ext) {
            if let Some(stem) = path.file_stem().and_then(|s| s.to_str()) {
                stems.push(stem.to_owned());
            }
        }
    }
    stems.sort();
    Ok(stems)
}

/// Reads every `*.pgm` mask in a directory, sorted by stem.
pub fn read_mask_dir(dir: impl AsRef<Path>) -> Result<Vec<(String, MaskGrid)>> {
    let dir = dir.as_ref();
    list_stems(dir, "pgm")?
        .into_iter()
        .map(|stem| {
            let m = read_mask(dir.join(format!("{stem}.pgm")))?;
            Ok((stem, m))
        })
        .collect()
}

pub fn image_path(root: &Path, name: &str) -> PathBuf {
    root.join(IMAGES_DIR).join(format!("{name}.ppm"))
}

pub fn mask_path(root: &Path, name: &str) -> PathBuf {
    root.join(MASKS_DIR).join(format!("{name}.pgm"))
}

pub fn read_dataset<T: Real>(root: impl AsRef<Path>) -> Result<Dataset<T>> {
    let root = root.as_ref();
    let stems = list_stems(&root.join(MASKS_DIR), "pgm")?;
    let mut items = Vec::with_capacity(stems.len());
    for name in stems {
        let ipath = image_path(root, &name);
        if !ipath.exists() {
            return Err(Error::Validation(format!("mask `{name}` has no image at {}", ipath.display())));
        }
        let image = read_image(&ipath)?;
        let mask = read_mask(mask_path(root, &name))?;
        items.push(Sample { name, image, mask });
    }
    Dataset::new(items)
}

pub fn write_dataset<T: Real>(ds: &Dataset<T>, root: impl AsRef<Path>) -> Result<()> {
    let root = root.as_ref();
    for sub in [IMAGES_DIR, MASKS_DIR] {
        let d = root.join(sub);
        fs::create_dir_all(&d).map_err(|e| Error::io(&d, e))?;
    }
    for s in ds.items() {
        write_image(&s.image, image_path(root, &s.name))?;
        write_mask(&s.mask, mask_path(root, &s.name))?;
    }
    Ok(())
}
