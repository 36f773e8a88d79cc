//! Reader and writer for the sparse `label idx:val idx:val ...` text format
//! (1-based feature indices).

use std::fs::File;
use std::io::{BufRead, BufReader, Write};
use std::path::Path;

use crate::error::{Error, Result};

use super::blr::{BlrTarget, GammaPrior, LabeledData};

/// Maps raw label values onto `{−1, +1}`: the `positive` value becomes `+1`,
/// everything else `−1`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct LabelRule {
    pub positive: f64,
}

impl Default for LabelRule {
    fn default() -> Self {
        Self { positive: 1.0 }
    }
}

impl LabelRule {
    pub fn map(&self, raw: f64) -> f64 {
        if raw == self.positive {
            1.0
        } else {
            -1.0
        }
    }
}

#[derive(Clone, Debug, Default)]
pub struct LibsvmOptions {
    /// Feature dimension to pad to; the largest observed index is used when absent.
    pub declared_dim: Option<usize>,
    pub label_rule: LabelRule,
    pub prior: GammaPrior,
}

/// Parses a whole libsvm document.
pub fn parse_libsvm<R: BufRead>(reader: R, opts: &LibsvmOptions) -> Result<LabeledData> {
    let mut rows = Vec::new();
    let mut labels = Vec::new();
    let mut max_index = 0usize;

    for (lineno, line) in reader.lines().enumerate() {
        let line = line?;
        let lineno = lineno + 1;
        let content = line.split('#').next().unwrap_or("").trim();
        if content.is_empty() {
            continue;
        }
        let parse_err = |message: String| Error::Parse { line: lineno, message };

        let mut tokens = content.split_whitespace();
        let label_tok = tokens.next().unwrap_or_default();
        let raw: f64 = label_tok
            .parse()
            .map_err(|_| parse_err(format!("invalid label `{label_tok}`")))?;

        let mut row = Vec::new();
        for tok in tokens {
            let (idx, val) = tok
                .split_once(':')
                .ok_or_else(|| parse_err(format!("expected `index:value`, found `{tok}`")))?;
            let idx: usize = idx
                .parse()
                .map_err(|_| parse_err(format!("invalid feature index `{idx}`")))?;
            if idx == 0 {
                return Err(parse_err("feature indices are 1-based".into()));
            }
            let val: f64 = val
                .parse()
                .map_err(|_| parse_err(format!("invalid feature value `{val}`")))?;
            max_index = max_index.max(idx);
            row.push((idx - 1, val));
        }
        rows.push(row);
        labels.push(opts.label_rule.map(raw));
    }

    if rows.is_empty() {
        return Err(Error::EmptyDataset);
    }
    let dim = match opts.declared_dim {
        Some(d) if d < max_index => {
            return Err(Error::Parse {
                line: 0,
                message: format!("feature index {max_index} exceeds declared dimension {d}"),
            })
        }
        Some(d) => d,
        None => max_index,
    };
    LabeledData::new(dim, rows, labels)
}

/// Loads a libsvm file as a logistic-regression target.
pub fn load_libsvm(path: impl AsRef<Path>, opts: &LibsvmOptions) -> Result<BlrTarget> {
    let file = File::open(path)?;
    let data = parse_libsvm(BufReader::new(file), opts)?;
    Ok(BlrTarget::new(data, opts.prior))
}

/// Writes `data` in libsvm format with `+1` / `-1` labels.
pub fn write_libsvm<W: Write>(mut w: W, data: &LabeledData) -> Result<()> {
    for (i, &y) in data.labels().iter().enumerate() {
        write!(w, "{}", if y > 0.0 { "+1" } else { "-1" })?;
        for (c, v) in data.row(i) {
            write!(w, " {}:{}", c + 1, v)?;
        }
        writeln!(w)?;
    }
    Ok(())
}
