//! Labeled datasets and weight distributions over their rows.

use std::ops::Neg;
use std::sync::OnceLock;

use crate::error::{Error, Result};
use crate::scalar::Scalar;

/// Binary label. There is no zero label.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Label {
    Negative,
    Positive,
}

impl Label {
    #[inline]
    pub fn value(self) -> i8 {
        match self {
            Label::Negative => -1,
            Label::Positive => 1,
        }
    }

    #[inline]
    pub fn to_scalar<F: Scalar>(self) -> F {
        match self {
            Label::Negative => -F::one(),
            Label::Positive => F::one(),
        }
    }

    /// Accepts exactly -1 and +1.
    pub fn from_value(v: i64) -> Option<Self> {
        match v {
            -1 => Some(Label::Negative),
            1 => Some(Label::Positive),
            _ => None,
        }
    }
}

impl Neg for Label {
    type Output = Label;
    fn neg(self) -> Label {
        match self {
            Label::Negative => Label::Positive,
            Label::Positive => Label::Negative,
        }
    }
}

impl std::fmt::Display for Label {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{:+}", self.value())
    }
}

/// `+1` for `v >= 0` (zero included), `-1` otherwise.
pub fn sign<F: Scalar>(v: F) -> Result<Label> {
    if !v.is_finite() {
        return Err(Error::NonFiniteSign);
    }
    Ok(sign_finite(v))
}

#[inline]
pub(crate) fn sign_finite<F: Scalar>(v: F) -> Label {
    if v >= F::zero() {
        Label::Positive
    } else {
        Label::Negative
    }
}

/// Immutable m×p feature matrix (row-major) with one label per row.
#[derive(Debug)]
pub struct Dataset<F> {
    features: Vec<F>,
    labels: Vec<Label>,
    cols: usize,
    // per-column row order by (value, row index); built on first use
    sorted: OnceLock<Vec<Vec<u32>>>,
}

impl<F: Scalar> Clone for Dataset<F> {
    fn clone(&self) -> Self {
        Dataset {
            features: self.features.clone(),
            labels: self.labels.clone(),
            cols: self.cols,
            sorted: OnceLock::new(),
        }
    }
}

impl<F: Scalar> PartialEq for Dataset<F> {
    fn eq(&self, other: &Self) -> bool {
        self.cols == other.cols && self.labels == other.labels && self.features == other.features
    }
}

impl<F: Scalar> Dataset<F> {
    /// Builds a dataset from a row-major buffer of `labels.len() * cols` values.
    pub fn from_flat(features: Vec<F>, cols: usize, labels: Vec<Label>) -> Result<Self> {
        let rows = labels.len();
        if rows == 0 || cols == 0 {
            return Err(Error::EmptyDataset { rows, cols });
        }
        if features.len() != rows * cols {
            return Err(Error::Shape(format!(
                "{} feature values for {rows} rows of {cols} columns",
                features.len()
            )));
        }
        if let Some(pos) = features.iter().position(|v| !v.is_finite()) {
            return Err(Error::NonFinite {
                row: pos / cols,
                column: pos % cols,
                value: features[pos].to_string(),
            });
        }
        Ok(Dataset { features, labels, cols, sorted: OnceLock::new() })
    }

    pub fn from_rows(rows: &[Vec<F>], labels: Vec<Label>) -> Result<Self> {
        let cols = rows.first().map_or(0, Vec::len);
        if let Some((i, r)) = rows.iter().enumerate().find(|(_, r)| r.len() != cols) {
            return Err(Error::Shape(format!("row {i} has {} columns, expected {cols}", r.len())));
        }
        if rows.len() != labels.len() {
            return Err(Error::LengthMismatch { expected: rows.len(), actual: labels.len() });
        }
        Self::from_flat(rows.concat(), cols, labels)
    }

    #[inline]
    pub fn n_rows(&self) -> usize {
        self.labels.len()
    }

    #[inline]
    pub fn n_cols(&self) -> usize {
        self.cols
    }

    #[inline]
    pub fn row(&self, i: usize) -> &[F] {
        &self.features[i * self.cols..(i + 1) * self.cols]
    }

    #[inline]
    pub fn label(&self, i: usize) -> Label {
        self.labels[i]
    }

    pub fn labels(&self) -> &[Label] {
        &self.labels
    }

    #[inline]
    pub fn value(&self, row: usize, col: usize) -> F {
        self.features[row * self.cols + col]
    }

    pub fn rows(&self) -> impl ExactSizeIterator<Item = (&[F], Label)> + '_ {
        self.features.chunks_exact(self.cols).zip(self.labels.iter().copied())
    }

    /// New dataset made of the given rows, in the given order. Repeats allowed.
    pub fn select(&self, indices: &[usize]) -> Result<Self> {
        let mut features = Vec::with_capacity(indices.len() * self.cols);
        let mut labels = Vec::with_capacity(indices.len());
        for &i in indices {
            if i >= self.n_rows() {
                return Err(Error::Shape(format!("row index {i} out of range {}", self.n_rows())));
            }
            features.extend_from_slice(self.row(i));
            labels.push(self.labels[i]);
        }
        Self::from_flat(features, self.cols, labels)
    }

    /// First `n` rows (all rows if fewer).
    pub fn head(&self, n: usize) -> Self {
        let n = n.min(self.n_rows());
        Dataset {
            features: self.features[..n * self.cols].to_vec(),
            labels: self.labels[..n].to_vec(),
            cols: self.cols,
            sorted: OnceLock::new(),
        }
    }

    /// Row indices of column `col` sorted ascending by value, ties by row index.
    pub fn sorted_column(&self, col: usize) -> &[u32] {
        &self.sorted.get_or_init(|| {
            (0..self.cols)
                .map(|c| {
                    let mut idx: Vec<u32> = (0..self.n_rows() as u32).collect();
                    idx.sort_by(|&a, &b| {
                        self.value(a as usize, c)
                            .partial_cmp(&self.value(b as usize, c))
                            .expect("finite features")
                            .then(a.cmp(&b))
                    });
                    idx
                })
                .collect()
        })[col]
    }
}

/// Nonnegative per-row weights summing to one.
#[derive(Debug, Clone, PartialEq)]
pub struct WeightDistribution<F> {
    weights: Vec<F>,
}

impl<F: Scalar> WeightDistribution<F> {
    pub fn new(weights: Vec<F>) -> Result<Self> {
        if weights.is_empty() {
            return Err(Error::InvalidWeights("empty".into()));
        }
        if let Some(w) = weights.iter().find(|w| !w.is_finite() || **w < F::zero()) {
            return Err(Error::InvalidWeights(format!("weight {w} is negative or non-finite")));
        }
        let total: F = weights.iter().copied().sum();
        if (total - F::one()).abs() > F::weight_tolerance() {
            return Err(Error::InvalidWeights(format!("weights sum to {total}")));
        }
        Ok(WeightDistribution { weights })
    }

    pub fn uniform(m: usize) -> Self {
        assert!(m > 0, "uniform distribution over zero rows");
        WeightDistribution { weights: vec![F::one() / F::from_count(m); m] }
    }

    /// Rescales nonnegative masses to sum to one.
    pub fn normalized(mut masses: Vec<F>) -> Result<Self> {
        let total: F = masses.iter().copied().sum();
        if !(total > F::zero()) || !total.is_finite() {
            return Err(Error::InvalidWeights(format!("cannot normalize total mass {total}")));
        }
        for w in &mut masses {
            *w /= total;
        }
        Self::new(masses)
    }

    #[inline]
    pub fn len(&self) -> usize {
        self.weights.len()
    }

    #[inline]
    pub fn is_empty(&self) -> bool {
        self.weights.is_empty()
    }

    #[inline]
    pub fn weight(&self, i: usize) -> F {
        self.weights[i]
    }

    pub fn weights(&self) -> &[F] {
        &self.weights
    }

    pub fn total(&self) -> F {
        self.weights.iter().copied().sum()
    }

    pub(crate) fn check_len(&self, rows: usize) -> Result<()> {
        if self.len() != rows {
            return Err(Error::LengthMismatch { expected: rows, actual: self.len() });
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sign_convention() {
        assert_eq!(sign(0.0_f64).unwrap(), Label::Positive);
        assert_eq!(sign(-0.0_f64).unwrap(), Label::Positive);
        assert_eq!(sign(-0.3_f64).unwrap(), Label::Negative);
        assert_eq!(sign(2.5_f64).unwrap(), Label::Positive);
        assert!(sign(f64::NAN).is_err());
        assert!(sign(f32::INFINITY).is_err());
    }

    #[test]
    fn label_values() {
        assert_eq!(Label::from_value(0), None);
        assert_eq!(Label::from_value(-1), Some(Label::Negative));
        assert_eq!(-Label::Positive, Label::Negative);
        assert_eq!(Label::Negative.to_scalar::<f32>(), -1.0);
    }

    #[test]
    fn rejects_non_finite_features() {
        let err = Dataset::from_rows(&[vec![1.0, f64::NAN]], vec![Label::Positive]).unwrap_err();
        match err {
            Error::NonFinite { row, column, .. } => assert_eq!((row, column), (0, 1)),
            e => panic!("unexpected {e}"),
        }
        assert!(Dataset::from_rows(&[vec![f64::INFINITY]], vec![Label::Positive]).is_err());
    }

    #[test]
    fn rejects_empty_and_ragged() {
        assert!(Dataset::<f64>::from_flat(vec![], 1, vec![]).is_err());
        assert!(Dataset::from_rows(&[vec![1.0], vec![1.0, 2.0]], vec![Label::Positive; 2]).is_err());
        assert!(Dataset::from_rows(&[vec![1.0]], vec![Label::Positive; 2]).is_err());
    }

    #[test]
    fn sorted_column_orders_by_value_then_row() {
        let d = Dataset::from_rows(
            &[vec![3.0], vec![1.0], vec![3.0], vec![2.0]],
            vec![Label::Positive; 4],
        )
        .unwrap();
        assert_eq!(d.sorted_column(0), &[1, 3, 0, 2]);
    }

    #[test]
    fn select_allows_repeats() {
        let d = Dataset::from_rows(&[vec![1.0], vec![2.0]], vec![Label::Positive, Label::Negative]).unwrap();
        let s = d.select(&[1, 1, 0]).unwrap();
        assert_eq!(s.n_rows(), 3);
        assert_eq!(s.row(1), &[2.0]);
        assert_eq!(s.label(2), Label::Positive);
        assert!(d.select(&[2]).is_err());
    }

    #[test]
    fn weight_validation() {
        assert!(WeightDistribution::new(vec![0.5, 0.5]).is_ok());
        assert!(WeightDistribution::new(vec![0.5, 0.6]).is_err());
        assert!(WeightDistribution::new(vec![1.5, -0.5]).is_err());
        assert!(WeightDistribution::new(vec![0.5 + 5e-10, 0.5]).is_ok());
        let u = WeightDistribution::<f64>::uniform(3);
        assert!((u.total() - 1.0).abs() < 1e-12);
        assert!(WeightDistribution::normalized(vec![0.0, 0.0]).is_err());
        let n = WeightDistribution::normalized(vec![3.0_f32, 1.0]).unwrap();
        assert_eq!(n.weights(), &[0.75, 0.25]);
    }
}
