use std::fs;
use std::path::{Path, PathBuf};

use serde_json::{json, Value};
use starprior::grid::{Center, MaskGrid, Pixel, ProbMap};
use starprior::io::{read_mask, read_probmap};
use starprior::loss::LossReport;

use crate::error::{CliError, CliResult};

/// Parses `row,col`.
pub fn parse_center(s: &str) -> CliResult<Center> {
    let bad = || CliError::usage(format!("invalid center `{s}`, expected `row,col`"));
    let (r, c) = s.split_once(',').ok_or_else(bad)?;
    let row = r.trim().parse().map_err(|_| bad())?;
    let col = c.trim().parse().map_err(|_| bad())?;
    Ok(Pixel::new(row, col))
}

/// Reads an SPF probability map, or a PGM mask as a binary map.
pub fn load_probmap(path: &Path) -> CliResult<ProbMap<f64>> {
    match path.extension().and_then(|e| e.to_str()) {
        Some("spf") => Ok(read_probmap(path)?),
        Some("pgm") => Ok(read_mask(path)?.to_probmap()),
        _ => Err(CliError::usage(format!("{}: expected a .spf or .pgm file", path.display()))),
    }
}

/// Prediction for `name` in `dir`: `<name>.spf` if present, else `<name>.pgm`.
pub fn find_prediction(dir: &Path, name: &str) -> CliResult<PathBuf> {
    for ext in ["spf", "pgm"] {
        let p = dir.join(format!("{name}.{ext}"));
        if p.exists() {
            return Ok(p);
        }
    }
    Err(CliError::Data(starprior::Error::Validation(format!("no prediction for `{name}` in {}", dir.display()))))
}

pub fn create_dir(path: &Path) -> CliResult<()> {
    fs::create_dir_all(path).map_err(|e| CliError::Data(io_error(path, e)))
}

pub fn write_file(path: &Path, bytes: &[u8]) -> CliResult<()> {
    fs::write(path, bytes).map_err(|e| CliError::Data(io_error(path, e)))
}

fn io_error(path: &Path, e: std::io::Error) -> starprior::Error {
    starprior::Error::Io { path: path.to_path_buf(), source: e }
}

pub fn report_json(r: &LossReport<f64>) -> Value {
    json!({ "total": r.total, "ce": r.ce, "sh": r.sh })
}

pub fn require_same_shape(a: &MaskGrid, b: &MaskGrid) -> CliResult<()> {
    if a.shape() != b.shape() {
        return Err(CliError::Data(starprior::Error::ShapeMismatch { expected: a.shape(), actual: b.shape() }));
    }
    Ok(())
}
