use crate::data::{Dataset, Label, WeightDistribution};
use crate::error::Result;
use crate::scalar::Scalar;
use crate::voting::{weighted_error, Hypothesis};

use super::WeakLearner;

/// Depth-one threshold rule: `polarity` when `x[feature] <= threshold`,
/// `-polarity` otherwise. A threshold of `-inf` sends every row right, so it
/// acts as a constant `-polarity` predictor.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Stump<F> {
    pub feature: usize,
    pub threshold: F,
    pub polarity: Label,
}

impl<F: Scalar> Stump<F> {
    pub fn is_constant(&self) -> bool {
        self.threshold == F::neg_infinity()
    }
}

impl<F: Scalar> Hypothesis<F> for Stump<F> {
    #[inline]
    fn predict(&self, row: &[F]) -> Label {
        if row[self.feature] <= self.threshold {
            self.polarity
        } else {
            -self.polarity
        }
    }
}

/// Decision-stump weak learner backed by [`train_stump`].
#[derive(Debug, Clone, Copy, Default)]
pub struct StumpLearner;

impl<F: Scalar> WeakLearner<F> for StumpLearner {
    type Hypothesis = Stump<F>;

    fn learn(&self, data: &Dataset<F>, dist: &WeightDistribution<F>) -> Result<Stump<F>> {
        train_stump(data, dist)
    }
}

/// Threshold strictly between `lo < hi` that keeps `lo` left and `hi` right.
fn split_point<F: Scalar>(lo: F, hi: F) -> F {
    let two = F::lit(2.0);
    let mid = lo / two + hi / two;
    if mid >= lo && mid < hi {
        mid
    } else {
        lo
    }
}

/// Exact weighted-error minimizer over (feature, threshold, polarity).
///
/// Thresholds are the below-minimum sentinel plus midpoints between
/// consecutive distinct values of each column. Ties go to the lowest feature,
/// then the lowest threshold, then polarity `+1`.
///
/// Prefix sums over the presorted columns give every candidate's error in one
/// pass; candidates within [`Scalar::rescore_slack`] of the best are then
/// re-scored row by row so the returned error is not subject to summation order.
pub fn train_stump<F: Scalar>(data: &Dataset<F>, dist: &WeightDistribution<F>) -> Result<Stump<F>> {
    dist.check_len(data.n_rows())?;
    let w = dist.weights();
    let (mut total_pos, mut total_neg) = (F::zero(), F::zero());
    for (i, &wi) in w.iter().enumerate() {
        match data.label(i) {
            Label::Positive => total_pos += wi,
            Label::Negative => total_neg += wi,
        }
    }

    let slack = F::rescore_slack();
    let mut best_fast = F::infinity();
    let mut shortlist: Vec<(Stump<F>, F)> = Vec::new();
    let mut consider = |stump: Stump<F>, err: F| {
        if err + slack < best_fast {
            best_fast = err;
            shortlist.retain(|(_, e)| *e <= err + slack);
        } else if err < best_fast {
            best_fast = err;
        }
        if err <= best_fast + slack {
            shortlist.push((stump, err));
        }
    };

    for feature in 0..data.n_cols() {
        let sentinel = F::neg_infinity();
        consider(Stump { feature, threshold: sentinel, polarity: Label::Positive }, total_pos);
        consider(Stump { feature, threshold: sentinel, polarity: Label::Negative }, total_neg);

        let order = data.sorted_column(feature);
        let (mut left_pos, mut left_neg) = (F::zero(), F::zero());
        for (k, &row) in order.iter().enumerate() {
            let row = row as usize;
            match data.label(row) {
                Label::Positive => left_pos += w[row],
                Label::Negative => left_neg += w[row],
            }
            let Some(&next) = order.get(k + 1) else { break };
            let (lo, hi) = (data.value(row, feature), data.value(next as usize, feature));
            if lo == hi {
                continue;
            }
            let threshold = split_point(lo, hi);
            consider(
                Stump { feature, threshold, polarity: Label::Positive },
                left_neg + (total_pos - left_pos),
            );
            consider(
                Stump { feature, threshold, polarity: Label::Negative },
                left_pos + (total_neg - left_neg),
            );
        }
    }

    // shortlist is in enumeration order, so the first strict minimum wins ties
    let mut best: Option<(Stump<F>, F)> = None;
    for (stump, fast) in shortlist {
        if fast > best_fast + slack {
            continue;
        }
        let exact = weighted_error(&stump, data, dist)?;
        if best.map_or(true, |(_, e)| exact < e) {
            best = Some((stump, exact));
        }
    }
    Ok(best.expect("sentinel candidates always present").0)
}

#[cfg(test)]
mod tests {
    use super::*;

    const P: Label = Label::Positive;
    const N: Label = Label::Negative;

    fn line(xs: &[f64], ys: &[Label]) -> Dataset<f64> {
        let rows: Vec<Vec<f64>> = xs.iter().map(|&x| vec![x]).collect();
        Dataset::from_rows(&rows, ys.to_vec()).unwrap()
    }

    #[test]
    fn separates_four_points() {
        let d = line(&[1.0, 2.0, 3.0, 4.0], &[N, N, P, P]);
        let u = WeightDistribution::uniform(4);
        let s = train_stump(&d, &u).unwrap();
        assert_eq!(s, Stump { feature: 0, threshold: 2.5, polarity: N });
        assert_eq!(weighted_error(&s, &d, &u).unwrap(), 0.0);
    }

    #[test]
    fn constant_labels_pick_sentinel() {
        let d = Dataset::from_rows(&[vec![1.0, 5.0], vec![2.0, 4.0], vec![3.0, 3.0]], vec![P; 3]).unwrap();
        let s = train_stump(&d, &WeightDistribution::uniform(3)).unwrap();
        assert_eq!(s.feature, 0);
        assert!(s.is_constant());
        assert_eq!(s.polarity, N);
        assert!(d.rows().all(|(x, _)| s.predict(x) == P));
    }

    #[test]
    fn weighted_two_points() {
        let d = line(&[1.0, 2.0], &[P, N]);
        let w = WeightDistribution::new(vec![0.1, 0.9]).unwrap();
        let s = train_stump(&d, &w).unwrap();
        assert_eq!(s, Stump { feature: 0, threshold: 1.5, polarity: P });
        assert_eq!(weighted_error(&s, &d, &w).unwrap(), 0.0);
    }

    #[test]
    fn duplicate_values_never_split() {
        let d = line(&[1.0, 1.0, 2.0], &[P, N, N]);
        let w = WeightDistribution::new(vec![0.6, 0.2, 0.2]).unwrap();
        let s = train_stump(&d, &w).unwrap();
        assert_eq!(s, Stump { feature: 0, threshold: 1.5, polarity: P });
        assert!((weighted_error(&s, &d, &w).unwrap() - 0.2).abs() < 1e-15);
    }

    #[test]
    fn adjacent_floats_keep_order() {
        let lo = 1.0_f64;
        let hi = f64::from_bits(lo.to_bits() + 1);
        let t = split_point(lo, hi);
        assert!(lo <= t && t < hi);
    }

    #[test]
    fn works_for_f32() {
        let rows = vec![vec![0.5_f32, 1.0], vec![0.25, 2.0], vec![0.75, 3.0]];
        let d = Dataset::from_rows(&rows, vec![N, N, P]).unwrap();
        let s = train_stump(&d, &WeightDistribution::uniform(3)).unwrap();
        assert_eq!(weighted_error(&s, &d, &WeightDistribution::uniform(3)).unwrap(), 0.0);
        assert_eq!(s.feature, 0);
    }

    #[test]
    fn length_mismatch_is_an_error() {
        let d = line(&[1.0, 2.0], &[P, N]);
        assert!(train_stump(&d, &WeightDistribution::uniform(3)).is_err());
    }
}
