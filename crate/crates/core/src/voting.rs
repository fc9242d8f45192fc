//! Hypotheses, normalized voting classifiers, majority ensembles and margins.

use crate::data::{sign_finite, Dataset, Label, WeightDistribution};
use crate::error::{Error, Result};
use crate::scalar::Scalar;

/// A total, deterministic map from a feature row to a label.
pub trait Hypothesis<F>: Send + Sync {
    fn predict(&self, row: &[F]) -> Label;
}

impl<F, H: Hypothesis<F> + ?Sized> Hypothesis<F> for &H {
    fn predict(&self, row: &[F]) -> Label {
        (**self).predict(row)
    }
}

/// Nonnegative combination of hypotheses, evaluated after normalizing the
/// coefficients to sum to one.
#[derive(Debug, Clone, PartialEq)]
pub struct Voter<F, H> {
    terms: Vec<(F, H)>,
    mass: F,
}

impl<F: Scalar, H: Hypothesis<F>> Voter<F, H> {
    pub fn new(terms: Vec<(F, H)>) -> Result<Self> {
        if terms.is_empty() {
            return Err(Error::InvalidVoter("no terms".into()));
        }
        if let Some((a, _)) = terms.iter().find(|(a, _)| !a.is_finite() || *a < F::zero()) {
            return Err(Error::InvalidVoter(format!("coefficient {a} is negative or non-finite")));
        }
        let mass: F = terms.iter().map(|(a, _)| *a).sum();
        if !(mass > F::zero()) {
            return Err(Error::ZeroMass);
        }
        Ok(Voter { terms, mass })
    }

    pub fn terms(&self) -> &[(F, H)] {
        &self.terms
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    /// Sum of the raw coefficients.
    pub fn mass(&self) -> F {
        self.mass
    }

    /// Normalized score in [-1, 1].
    pub fn score(&self, row: &[F]) -> F {
        let raw: F = self
            .terms
            .iter()
            .fold(F::zero(), |acc, (a, h)| match h.predict(row) {
                Label::Positive => acc + *a,
                Label::Negative => acc - *a,
            });
        (raw / self.mass).max(-F::one()).min(F::one())
    }

    pub fn predict(&self, row: &[F]) -> Label {
        sign_finite(self.score(row))
    }

    /// Per-row margins `y_i * score(x_i)` of this voter on `data`.
    pub fn margins(&self, data: &Dataset<F>) -> MarginReport<F> {
        MarginReport::from_margins(
            data.rows().map(|(x, y)| y.to_scalar::<F>() * self.score(x)).collect(),
        )
    }
}

impl<F: Scalar, H: Hypothesis<F>> Hypothesis<F> for Voter<F, H> {
    fn predict(&self, row: &[F]) -> Label {
        Voter::predict(self, row)
    }
}

/// Unweighted majority over voters; a tied vote resolves to `+1`.
#[derive(Debug, Clone, PartialEq)]
pub struct Ensemble<F, H> {
    voters: Vec<Voter<F, H>>,
}

impl<F: Scalar, H: Hypothesis<F>> Ensemble<F, H> {
    pub fn new(voters: Vec<Voter<F, H>>) -> Result<Self> {
        if voters.is_empty() {
            return Err(Error::EmptyEnsemble);
        }
        Ok(Ensemble { voters })
    }

    pub fn voters(&self) -> &[Voter<F, H>] {
        &self.voters
    }

    pub fn len(&self) -> usize {
        self.voters.len()
    }

    pub fn is_empty(&self) -> bool {
        self.voters.is_empty()
    }

    pub fn into_voters(self) -> Vec<Voter<F, H>> {
        self.voters
    }

    pub fn predict(&self, row: &[F]) -> Label {
        let votes: i64 = self.voters.iter().map(|v| i64::from(v.predict(row).value())).sum();
        if votes >= 0 {
            Label::Positive
        } else {
            Label::Negative
        }
    }
}

impl<F: Scalar, H: Hypothesis<F>> Hypothesis<F> for Ensemble<F, H> {
    fn predict(&self, row: &[F]) -> Label {
        Ensemble::predict(self, row)
    }
}

/// Margins of a voter on a labeled sample.
#[derive(Debug, Clone, PartialEq)]
pub struct MarginReport<F> {
    pub margins: Vec<F>,
    pub min_margin: F,
}

impl<F: Scalar> MarginReport<F> {
    pub fn from_margins(margins: Vec<F>) -> Self {
        let min_margin = margins.iter().copied().fold(F::infinity(), F::min);
        MarginReport { margins, min_margin }
    }

    /// Fraction of rows whose margin is strictly below `threshold`.
    pub fn fraction_below(&self, threshold: F) -> F {
        if self.margins.is_empty() {
            return F::zero();
        }
        let n = self.margins.iter().filter(|&&m| m < threshold).count();
        F::from_count(n) / F::from_count(self.margins.len())
    }

    pub fn mean(&self) -> F {
        if self.margins.is_empty() {
            return F::zero();
        }
        self.margins.iter().copied().sum::<F>() / F::from_count(self.margins.len())
    }

    /// Counts over `bins` equal-width buckets spanning [-1, 1]; 1.0 lands in the last.
    pub fn histogram(&self, bins: usize) -> Vec<usize> {
        let mut counts = vec![0; bins.max(1)];
        let width = F::lit(2.0) / F::from_count(counts.len());
        for &m in &self.margins {
            let b = ((m + F::one()) / width).floor().to_usize().unwrap_or(0);
            counts[b.min(bins.max(1) - 1)] += 1;
        }
        counts
    }
}

/// `sum_i dist[i] * 1{h(x_i) != y_i}`.
pub fn weighted_error<F: Scalar, H: Hypothesis<F> + ?Sized>(
    h: &H,
    data: &Dataset<F>,
    dist: &WeightDistribution<F>,
) -> Result<F> {
    dist.check_len(data.n_rows())?;
    Ok(data
        .rows()
        .zip(dist.weights())
        .filter(|((x, y), _)| h.predict(x) != *y)
        .fold(F::zero(), |acc, (_, w)| acc + *w))
}

/// Fraction of rows the predictor gets wrong.
pub fn test_error<F: Scalar>(predictor: impl Fn(&[F]) -> Label, data: &Dataset<F>) -> F {
    let wrong = data.rows().filter(|(x, y)| predictor(x) != *y).count();
    F::from_count(wrong) / F::from_count(data.n_rows())
}

#[cfg(test)]
mod tests {
    use super::*;

    /// Constant or table-driven hypothesis for tests.
    #[derive(Debug, Clone, PartialEq)]
    struct Fixed(Vec<Label>);

    impl Hypothesis<f64> for Fixed {
        fn predict(&self, row: &[f64]) -> Label {
            self.0[row[0] as usize]
        }
    }

    const P: Label = Label::Positive;
    const N: Label = Label::Negative;

    fn points(labels: &[Label]) -> Dataset<f64> {
        let rows: Vec<Vec<f64>> = (0..labels.len()).map(|i| vec![i as f64]).collect();
        Dataset::from_rows(&rows, labels.to_vec()).unwrap()
    }

    #[test]
    fn voter_scores() {
        let single = Voter::new(vec![(1.0, Fixed(vec![P]))]).unwrap();
        assert_eq!(single.score(&[0.0]), 1.0);

        let pair = Voter::new(vec![(1.0, Fixed(vec![P])), (1.0, Fixed(vec![N]))]).unwrap();
        assert_eq!(pair.score(&[0.0]), 0.0);
        assert_eq!(pair.predict(&[0.0]), P);

        let skewed = Voter::new(vec![(3.0, Fixed(vec![P])), (1.0, Fixed(vec![N]))]).unwrap();
        assert_eq!(skewed.score(&[0.0]), 0.5);
        assert_eq!(skewed.predict(&[0.0]), P);
        let flipped = Voter::new(vec![(1.0, Fixed(vec![P])), (3.0, Fixed(vec![N]))]).unwrap();
        assert_eq!(flipped.score(&[0.0]), -0.5);
        assert_eq!(flipped.predict(&[0.0]), N);
    }

    #[test]
    fn voter_rejects_bad_coefficients() {
        assert!(matches!(Voter::new(vec![(0.0, Fixed(vec![P]))]), Err(Error::ZeroMass)));
        assert!(Voter::new(vec![(-1.0, Fixed(vec![P])), (2.0, Fixed(vec![P]))]).is_err());
        assert!(Voter::<f64, Fixed>::new(vec![]).is_err());
    }

    #[test]
    fn margins_follow_labels() {
        let data = points(&[P, P, P]);
        let unanimous = Voter::new(vec![(1.0, Fixed(vec![P; 3]))]).unwrap();
        let r = unanimous.margins(&data);
        assert_eq!(r.margins, vec![1.0; 3]);
        assert_eq!(r.min_margin, 1.0);

        let split = Voter::new(vec![(1.0, Fixed(vec![P; 3])), (1.0, Fixed(vec![N; 3]))]).unwrap();
        assert_eq!(split.margins(&data).margins, vec![0.0; 3]);

        let data = points(&[P, N]);
        let v = Voter::new(vec![(3.0, Fixed(vec![P, N])), (1.0, Fixed(vec![N, P]))]).unwrap();
        let r = v.margins(&data);
        assert_eq!(r.margins, vec![0.5, 0.5]);
        assert_eq!(r.fraction_below(0.6), 1.0);
        assert_eq!(r.fraction_below(0.5), 0.0);
    }

    #[test]
    fn histogram_covers_closed_interval() {
        let r = MarginReport::from_margins(vec![-1.0, 0.0, 0.99, 1.0]);
        assert_eq!(r.histogram(4), vec![1, 0, 1, 2]);
    }

    #[test]
    fn majority_vote() {
        let v = |l: Label| Voter::new(vec![(1.0, Fixed(vec![l]))]).unwrap();
        let all = Ensemble::new(vec![v(P); 5]).unwrap();
        assert_eq!(all.predict(&[0.0]), P);
        let minority = Ensemble::new(vec![v(P), v(N), v(P), v(N), v(N)]).unwrap();
        assert_eq!(minority.predict(&[0.0]), N);
        let tied = Ensemble::new(vec![v(P), v(N), v(N), v(P)]).unwrap();
        assert_eq!(tied.predict(&[0.0]), P);
        assert!(matches!(Ensemble::<f64, Fixed>::new(vec![]), Err(Error::EmptyEnsemble)));
    }

    #[test]
    fn error_measures() {
        let data = points(&[P, P, P, P]);
        let perfect = Fixed(vec![P; 4]);
        let u = WeightDistribution::uniform(4);
        assert_eq!(weighted_error(&perfect, &data, &u).unwrap(), 0.0);
        let one_wrong = Fixed(vec![P, P, N, P]);
        assert_eq!(weighted_error(&one_wrong, &data, &u).unwrap(), 0.25);

        let data2 = points(&[P, P]);
        let w = WeightDistribution::new(vec![0.9, 0.1]).unwrap();
        assert_eq!(weighted_error(&Fixed(vec![P, N]), &data2, &w).unwrap(), 0.1);
        assert!(weighted_error(&perfect, &data, &w).is_err());

        assert_eq!(test_error(|x| perfect.predict(x), &data), 0.0);
        let labels: Vec<Label> = (0..10).map(|i| if i < 3 { N } else { P }).collect();
        let d = points(&labels);
        assert!((test_error(|_| P, &d) - 0.3).abs() < 1e-15);
    }
}
