//! LIBSVM text format: one example per line, `label index:value ...`.
//!
//! Indices are 1-based and strictly increasing within a line; absent
//! indices are zero. Anything after `#` is a comment. Label tokens are
//! mapped to class ids in order of first appearance.

use alloc::format;
use alloc::string::{String, ToString};
use alloc::vec::Vec;
use core::fmt::Write as _;

use crate::error::{Error, Result};
use crate::matrix::Matrix;
use crate::pool::ClassId;

/// Largest accepted feature index; anything above is treated as corrupt input.
pub const MAX_FEATURE_INDEX: usize = 1 << 20;
/// Largest accepted dense size (rows x columns) of a parsed file.
pub const MAX_CELLS: usize = 1 << 27;

#[derive(Debug, Clone, PartialEq)]
pub struct RawDataset {
    pub features: Matrix,
    pub labels: Vec<ClassId>,
    /// Original label token for each class id.
    pub class_table: Vec<String>,
}

impl RawDataset {
    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    pub fn dim(&self) -> usize {
        self.features.cols()
    }

    pub fn n_classes(&self) -> usize {
        self.class_table.len()
    }

    pub fn class_id(&self, token: &str) -> Option<ClassId> {
        self.class_table.iter().position(|t| t == token)
    }

    /// Rows at `indices`, in order, sharing this dataset's class table.
    pub fn subset(&self, indices: &[usize]) -> RawDataset {
        RawDataset {
            features: self.features.select_rows(indices),
            labels: indices.iter().map(|&i| self.labels[i]).collect(),
            class_table: self.class_table.clone(),
        }
    }
}

fn parse_error(line: usize, message: impl Into<String>) -> Error {
    Error::Parse {
        line,
        message: message.into(),
    }
}

pub fn parse_libsvm(text: &str) -> Result<RawDataset> {
    let mut rows: Vec<Vec<(usize, f64)>> = Vec::new();
    let mut labels = Vec::new();
    let mut class_table: Vec<String> = Vec::new();
    let mut dim = 0usize;
    let mut last_line = 0usize;

    for (lineno, raw) in text.lines().enumerate() {
        let lineno = lineno + 1;
        last_line = lineno;
        let content = raw.split('#').next().unwrap_or("").trim();
        if content.is_empty() {
            continue;
        }
        let mut tokens = content.split_whitespace();
        let label = tokens.next().expect("nonempty line has a token");
        if !label.parse::<f64>().is_ok_and(f64::is_finite) {
            return Err(parse_error(lineno, format!("invalid label `{label}`")));
        }
        let class = match class_table.iter().position(|t| t == label) {
            Some(c) => c,
            None => {
                class_table.push(label.to_string());
                class_table.len() - 1
            }
        };

        let mut pairs = Vec::new();
        let mut prev = 0usize;
        for tok in tokens {
            let (idx, val) = tok
                .split_once(':')
                .ok_or_else(|| parse_error(lineno, format!("malformed pair `{tok}`")))?;
            let idx: usize = idx
                .parse()
                .map_err(|_| parse_error(lineno, format!("invalid feature index `{idx}`")))?;
            if idx == 0 {
                return Err(parse_error(lineno, "feature indices are 1-based"));
            }
            if idx > MAX_FEATURE_INDEX {
                return Err(parse_error(lineno, format!("feature index {idx} too large")));
            }
            if idx <= prev {
                return Err(parse_error(
                    lineno,
                    format!("feature index {idx} not greater than previous {prev}"),
                ));
            }
            let val: f64 = match val.parse::<f64>() {
                Ok(v) if v.is_finite() => v,
                _ => return Err(parse_error(lineno, format!("non-numeric value `{val}`"))),
            };
            prev = idx;
            dim = dim.max(idx);
            pairs.push((idx, val));
        }
        rows.push(pairs);
        labels.push(class);
    }

    if rows.is_empty() {
        return Err(parse_error(last_line.max(1), "no examples"));
    }
    if dim == 0 {
        return Err(parse_error(last_line, "no features in any example"));
    }
    if rows.len().saturating_mul(dim) > MAX_CELLS {
        return Err(parse_error(
            last_line,
            format!("{} rows x {dim} columns exceeds {MAX_CELLS} cells", rows.len()),
        ));
    }
    let mut features = Matrix::zeros(rows.len(), dim);
    for (i, pairs) in rows.iter().enumerate() {
        for &(idx, val) in pairs {
            features[(i, idx - 1)] = val;
        }
    }
    Ok(RawDataset {
        features,
        labels,
        class_table,
    })
}

/// Canonical LIBSVM text: nonzero entries only, plus an explicit `d:0` on the
/// first line when the last column is all zero so the width survives a reparse.
pub fn to_libsvm_string(data: &RawDataset) -> String {
    let d = data.dim();
    let last_col_used = (0..data.len()).any(|i| data.features[(i, d - 1)] != 0.0);
    let mut out = String::new();
    for (i, row) in data.features.iter_rows().enumerate() {
        out.push_str(&data.class_table[data.labels[i]]);
        for (j, &v) in row.iter().enumerate() {
            if v != 0.0 {
                let _ = write!(out, " {}:{}", j + 1, v);
            }
        }
        if i == 0 && !last_col_used && row[d - 1] == 0.0 {
            let _ = write!(out, " {d}:0");
        }
        out.push('\n');
    }
    out
}
