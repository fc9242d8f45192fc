use std::cmp::Ordering;
use std::collections::HashMap;
use std::fs;
use std::path::Path;

use crate::data::{Dataset, Label};
use crate::error::{Error, Result};

use super::csv_io::RawTable;

/// Rows kept from the head of the Higgs file.
pub const HIGGS_ROWS: usize = 300_000;

fn class_order(a: &str, b: &str) -> Ordering {
    match (a.parse::<f64>(), b.parse::<f64>()) {
        (Ok(x), Ok(y)) => x.partial_cmp(&y).unwrap_or(Ordering::Equal),
        _ => a.cmp(b),
    }
}

/// Keeps the two most frequent classes: the most frequent becomes `+1`, the
/// runner-up `-1`. Frequency ties go to the smaller class id.
pub fn prepare_covertype(table: &RawTable) -> Result<Dataset<f64>> {
    let mut counts: HashMap<&str, usize> = HashMap::new();
    for c in &table.classes {
        *counts.entry(c.as_str()).or_default() += 1;
    }
    if counts.len() < 2 {
        return Err(Error::Config(format!("need at least 2 classes, found {}", counts.len())));
    }
    let mut ranked: Vec<(&str, usize)> = counts.into_iter().collect();
    ranked.sort_by(|a, b| b.1.cmp(&a.1).then_with(|| class_order(a.0, b.0)));
    let (first, second) = (ranked[0].0, ranked[1].0);

    let mut features = Vec::new();
    let mut labels = Vec::new();
    for (i, c) in table.classes.iter().enumerate() {
        let label = if c == first {
            Label::Positive
        } else if c == second {
            Label::Negative
        } else {
            continue;
        };
        features.extend_from_slice(table.row(i));
        labels.push(label);
    }
    Dataset::from_flat(features, table.cols, labels)
}

/// Keeps the first `limit` rows, warning when the file is shorter.
pub fn truncate_higgs(data: &Dataset<f64>, limit: usize) -> Dataset<f64> {
    if data.n_rows() < limit {
        log::warn!("only {} rows available, fewer than the requested {limit}", data.n_rows());
    }
    data.head(limit)
}

/// Reads the whitespace-separated particle-ID file whose first line holds the
/// signal and background counts; signal rows come first and are labeled `+1`.
pub fn load_boone(path: impl AsRef<Path>) -> Result<Dataset<f64>> {
    let path = path.as_ref();
    let shown = path.display().to_string();
    let text = fs::read_to_string(path)?;
    let mut lines = text.lines().enumerate().filter(|(_, l)| !l.trim().is_empty());
    let err = |row: usize, column: usize, message: String| Error::Parse { path: shown.clone(), row, column, message };

    let (_, head) = lines.next().ok_or_else(|| err(1, 1, "empty file".into()))?;
    let counts: Vec<usize> = head
        .split_whitespace()
        .map(|t| t.parse().map_err(|_| err(1, 1, format!("bad count `{t}`"))))
        .collect::<Result<_>>()?;
    let [signal, background] = counts[..] else {
        return Err(err(1, 1, "expected `<signal> <background>` counts".into()));
    };

    let mut features = Vec::new();
    let mut labels = Vec::new();
    let mut cols = None;
    for (n, line) in lines {
        let before = features.len();
        for (c, tok) in line.split_whitespace().enumerate() {
            let v: f64 = tok.parse().map_err(|_| err(n + 1, c + 1, format!("non-numeric feature `{tok}`")))?;
            if !v.is_finite() {
                return Err(err(n + 1, c + 1, format!("non-finite feature `{tok}`")));
            }
            features.push(v);
        }
        let width = features.len() - before;
        if *cols.get_or_insert(width) != width {
            return Err(err(n + 1, width, "inconsistent column count".into()));
        }
        labels.push(if labels.len() < signal { Label::Positive } else { Label::Negative });
    }
    if labels.len() != signal + background {
        return Err(Error::Shape(format!("header promises {} rows, found {}", signal + background, labels.len())));
    }
    Dataset::from_flat(features, cols.unwrap_or(0), labels)
}
