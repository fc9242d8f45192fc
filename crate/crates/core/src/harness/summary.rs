use std::io::Write;

use crate::error::Result;
use crate::meta::Algorithm;

use super::experiment::ResultRow;

pub const SUMMARY_HEADER: &str = "dataset,algorithm,k,mean_accuracy,std_accuracy,runs";

#[derive(Debug, Clone, PartialEq)]
pub struct SummaryRow {
    pub dataset: String,
    pub algorithm: Algorithm,
    pub k: usize,
    pub mean_accuracy: f64,
    /// Sample standard deviation; 0 for a single run.
    pub std_accuracy: f64,
    pub runs: usize,
}

/// Mean and standard deviation of test accuracy per (dataset, algorithm, k),
/// in order of first appearance. Failed rows are skipped.
pub fn summarize(rows: &[ResultRow]) -> Vec<SummaryRow> {
    let mut groups: Vec<((String, Algorithm, usize), Vec<f64>)> = Vec::new();
    for r in rows {
        let Some(acc) = r.test_accuracy else { continue };
        let key = (r.dataset.clone(), r.algorithm, r.k);
        match groups.iter_mut().find(|(k, _)| *k == key) {
            Some((_, v)) => v.push(acc),
            None => groups.push((key, vec![acc])),
        }
    }
    groups
        .into_iter()
        .map(|((dataset, algorithm, k), acc)| {
            let n = acc.len() as f64;
            let mean = acc.iter().sum::<f64>() / n;
            let std = if acc.len() < 2 {
                0.0
            } else {
                (acc.iter().map(|a| (a - mean).powi(2)).sum::<f64>() / (n - 1.0)).sqrt()
            };
            SummaryRow { dataset, algorithm, k, mean_accuracy: mean, std_accuracy: std, runs: acc.len() }
        })
        .collect()
}

pub fn write_summary_csv<W: Write>(rows: &[SummaryRow], mut out: W) -> Result<()> {
    writeln!(out, "{SUMMARY_HEADER}")?;
    for r in rows {
        writeln!(
            out,
            "{},{},{},{},{},{}",
            r.dataset, r.algorithm, r.k, r.mean_accuracy, r.std_accuracy, r.runs
        )?;
    }
    Ok(())
}
