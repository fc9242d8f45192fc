use std::fmt;
use std::fs::File;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::data::{Dataset, Label};
use crate::error::{Error, Result};

/// Environment variable naming the root for relative dataset paths.
pub const DATA_DIR_ENV: &str = "BOOSTLAB_DATA_DIR";

/// Resolves a relative path against `$BOOSTLAB_DATA_DIR` when it is set.
pub fn resolve_data_path(path: impl AsRef<Path>) -> PathBuf {
    let path = path.as_ref();
    match std::env::var_os(DATA_DIR_ENV) {
        Some(root) if path.is_relative() && !path.exists() => Path::new(&root).join(path),
        _ => path.to_path_buf(),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum LabelColumn {
    #[default]
    Last,
    Index(usize),
}

impl LabelColumn {
    fn resolve(self, width: usize) -> usize {
        match self {
            LabelColumn::Last => width.saturating_sub(1),
            LabelColumn::Index(i) => i,
        }
    }
}

impl FromStr for LabelColumn {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s.trim() {
            "last" => Ok(LabelColumn::Last),
            n => n
                .parse()
                .map(LabelColumn::Index)
                .map_err(|_| Error::Config(format!("label column `{s}` is neither `last` nor an index"))),
        }
    }
}

impl fmt::Display for LabelColumn {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            LabelColumn::Last => f.write_str("last"),
            LabelColumn::Index(i) => write!(f, "{i}"),
        }
    }
}

impl Serialize for LabelColumn {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        match self {
            LabelColumn::Last => s.serialize_str("last"),
            LabelColumn::Index(i) => s.serialize_u64(*i as u64),
        }
    }
}

impl<'de> Deserialize<'de> for LabelColumn {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Repr {
            Index(usize),
            Name(String),
        }
        match Repr::deserialize(d)? {
            Repr::Index(i) => Ok(LabelColumn::Index(i)),
            Repr::Name(s) => s.parse().map_err(serde::de::Error::custom),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct CsvOptions {
    pub label_column: LabelColumn,
    /// Raw label value mapped to `+1`; every other value maps to `-1`.
    pub positive: String,
    /// Stop after this many data rows.
    pub max_rows: Option<usize>,
}

impl Default for CsvOptions {
    fn default() -> Self {
        CsvOptions { label_column: LabelColumn::Last, positive: "1".into(), max_rows: None }
    }
}

/// Numeric features with raw (unmapped) class labels.
#[derive(Debug, Clone, PartialEq)]
pub struct RawTable {
    pub features: Vec<f64>,
    pub cols: usize,
    pub classes: Vec<String>,
}

impl RawTable {
    pub fn n_rows(&self) -> usize {
        self.classes.len()
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.features[i * self.cols..(i + 1) * self.cols]
    }
}

fn same_label(raw: &str, positive: &str) -> bool {
    match (raw.parse::<f64>(), positive.parse::<f64>()) {
        (Ok(a), Ok(b)) => a == b,
        _ => raw == positive,
    }
}

/// Maps raw classes to `±1` and validates the features.
pub fn binarize(table: &RawTable, positive: &str) -> Result<Dataset<f64>> {
    let labels = table
        .classes
        .iter()
        .map(|c| if same_label(c, positive) { Label::Positive } else { Label::Negative })
        .collect();
    Dataset::from_flat(table.features.clone(), table.cols, labels)
}

/// Reads a comma-separated file of numeric features plus one label column.
/// A first row with any non-numeric feature cell is taken as a header.
pub fn load_raw_csv(path: impl AsRef<Path>, label_column: LabelColumn, max_rows: Option<usize>) -> Result<RawTable> {
    let path = path.as_ref();
    let shown = path.display().to_string();
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(false)
        .flexible(true)
        .trim(csv::Trim::All)
        .from_path(path)?;

    let mut features = Vec::new();
    let mut classes = Vec::new();
    let mut width: Option<usize> = None;
    let parse_err = |row: usize, column: usize, message: String| Error::Parse {
        path: shown.clone(),
        row,
        column,
        message,
    };

    for (line, record) in reader.records().enumerate() {
        let record = record?;
        let row = line + 1;
        if record.iter().all(str::is_empty) {
            continue;
        }
        let label_at = label_column.resolve(record.len());
        let is_feature = |c: usize| c != label_at;

        if line == 0 && record.iter().enumerate().any(|(c, v)| is_feature(c) && v.parse::<f64>().is_err()) {
            continue;
        }
        if let Some(w) = width {
            if record.len() != w {
                return Err(parse_err(row, record.len(), format!("expected {w} cells, found {}", record.len())));
            }
        } else {
            if record.len() < 2 || label_at >= record.len() {
                return Err(parse_err(row, label_at + 1, "missing label".into()));
            }
            width = Some(record.len());
        }
        let label = record.get(label_at).unwrap_or("");
        if label.is_empty() {
            return Err(parse_err(row, label_at + 1, "missing label".into()));
        }
        for (c, cell) in record.iter().enumerate().filter(|(c, _)| is_feature(*c)) {
            let v: f64 = cell
                .parse()
                .map_err(|_| parse_err(row, c + 1, format!("non-numeric feature `{cell}`")))?;
            if !v.is_finite() {
                return Err(parse_err(row, c + 1, format!("non-finite feature `{cell}`")));
            }
            features.push(v);
        }
        classes.push(label.to_string());
        if max_rows.is_some_and(|n| classes.len() >= n) {
            break;
        }
    }
    let cols = width.map_or(0, |w| w - 1);
    if classes.is_empty() {
        return Err(Error::EmptyDataset { rows: 0, cols });
    }
    Ok(RawTable { features, cols, classes })
}

/// [`load_raw_csv`] followed by [`binarize`].
pub fn load_csv(path: impl AsRef<Path>, opts: &CsvOptions) -> Result<Dataset<f64>> {
    binarize(&load_raw_csv(path, opts.label_column, opts.max_rows)?, &opts.positive)
}

/// Writes `f0..f{p-1},label` with labels as `1`/`-1`; reloads with the defaults of [`CsvOptions`].
pub fn write_dataset_csv(data: &Dataset<f64>, path: impl AsRef<Path>) -> Result<()> {
    let mut out = std::io::BufWriter::new(File::create(path)?);
    let header: Vec<String> = (0..data.n_cols()).map(|j| format!("f{j}")).chain(["label".into()]).collect();
    writeln!(out, "{}", header.join(","))?;
    for (x, y) in data.rows() {
        for v in x {
            write!(out, "{v},")?;
        }
        writeln!(out, "{}", y.value())?;
    }
    out.flush()?;
    Ok(())
}
