//! Loading LIBSVM files and the optional display hints that accompany them.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use active_core::{parse_libsvm, RawDataset};
use anyhow::Context;
use serde::{Deserialize, Serialize};

/// How to show an example to a human. Read from `<stem>.hint.json` next to the data file.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct DisplayHint {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub feature_names: Option<Vec<String>>,
    /// `[rows, cols]` when the feature vector is a row-major grayscale image.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub image_shape: Option<[usize; 2]>,
}

impl DisplayHint {
    pub fn feature_name(&self, j: usize) -> String {
        self.feature_names
            .as_ref()
            .and_then(|names| names.get(j).cloned())
            .unwrap_or_else(|| format!("f{}", j + 1))
    }

    /// Text rendering: a shaded character grid for images, a name/value table otherwise.
    pub fn render(&self, features: &[f64]) -> String {
        match self.image_shape {
            Some([rows, cols]) if rows * cols == features.len() && rows * cols > 0 => {
                render_image(features, rows, cols)
            }
            _ => {
                let width = (0..features.len()).map(|j| self.feature_name(j).len()).max().unwrap_or(0);
                let mut out = String::new();
                for (j, v) in features.iter().enumerate() {
                    let _ = writeln!(out, "  {:>width$}  {v}", self.feature_name(j));
                }
                out
            }
        }
    }
}

fn render_image(pixels: &[f64], rows: usize, cols: usize) -> String {
    const SHADES: &[u8] = b" .:-=+*#%@";
    let lo = pixels.iter().copied().fold(f64::INFINITY, f64::min);
    let hi = pixels.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let span = if hi > lo { hi - lo } else { 1.0 };
    let mut out = String::with_capacity(rows * (cols + 1));
    for r in 0..rows {
        for &v in &pixels[r * cols..(r + 1) * cols] {
            let level = (((v - lo) / span) * (SHADES.len() - 1) as f64).round() as usize;
            out.push(SHADES[level.min(SHADES.len() - 1)] as char);
        }
        out.push('\n');
    }
    out
}

#[derive(Debug, Clone)]
pub struct DatasetEntry {
    pub id: String,
    pub path: PathBuf,
    pub data: RawDataset,
    pub hint: DisplayHint,
}

pub fn load_dataset(path: &Path) -> anyhow::Result<RawDataset> {
    let text = std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    parse_libsvm(&text).with_context(|| format!("parsing {}", path.display()))
}

/// The data file plus its hint sidecar, if any.
pub fn load_entry(path: &Path) -> anyhow::Result<DatasetEntry> {
    let data = load_dataset(path)?;
    let id = path
        .file_stem()
        .and_then(|s| s.to_str())
        .with_context(|| format!("no usable file name in {}", path.display()))?
        .to_string();
    let hint_path = path.with_file_name(format!("{id}.hint.json"));
    let hint = if hint_path.exists() {
        let text = std::fs::read_to_string(&hint_path).with_context(|| format!("reading {}", hint_path.display()))?;
        serde_json::from_str(&text).with_context(|| format!("parsing {}", hint_path.display()))?
    } else {
        DisplayHint::default()
    };
    Ok(DatasetEntry { id, path: path.to_path_buf(), data, hint })
}

/// Every `*.libsvm` file in `dir`, keyed by file stem.
pub fn load_dir(dir: &Path) -> anyhow::Result<BTreeMap<String, DatasetEntry>> {
    let mut out = BTreeMap::new();
    let listing = std::fs::read_dir(dir).with_context(|| format!("listing {}", dir.display()))?;
    for item in listing {
        let path = item?.path();
        if path.extension().is_some_and(|e| e == "libsvm") {
            let entry = load_entry(&path)?;
            out.insert(entry.id.clone(), entry);
        }
    }
    Ok(out)
}
