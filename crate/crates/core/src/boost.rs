//! AdaBoost with exponential reweighting.

use std::io::Write;

use crate::data::{Dataset, WeightDistribution};
use crate::error::{Error, Result};
use crate::scalar::Scalar;
use crate::voting::{weighted_error, Hypothesis, MarginReport, Voter};
use crate::weak::WeakLearner;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BoostConfig {
    pub rounds: usize,
    /// ε is clamped to `[floor, 1 - floor]` before computing α.
    pub epsilon_floor: f64,
    /// Stop after the first hypothesis with zero weighted error.
    pub stop_on_perfect: bool,
}

impl Default for BoostConfig {
    fn default() -> Self {
        BoostConfig { rounds: 300, epsilon_floor: 1e-10, stop_on_perfect: true }
    }
}

impl BoostConfig {
    pub fn with_rounds(rounds: usize) -> Self {
        BoostConfig { rounds, ..Self::default() }
    }

    pub fn validate(&self) -> Result<()> {
        if self.rounds == 0 {
            return Err(Error::Config("rounds must be at least 1".into()));
        }
        if !(self.epsilon_floor > 0.0 && self.epsilon_floor < 0.5) {
            return Err(Error::Config(format!("epsilon_floor {} outside (0, 1/2)", self.epsilon_floor)));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RoundRecord<F> {
    /// 1-based round index.
    pub round: usize,
    pub epsilon: F,
    pub alpha: F,
    /// Minimum normalized margin of the voter built so far, on the training set.
    pub min_margin: F,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum StopReason {
    /// All configured rounds ran.
    RoundLimit,
    /// A hypothesis with zero weighted error was found.
    Perfect,
    /// The weak learner returned a hypothesis with ε ≥ 1/2; it was discarded.
    NoAdvantage,
}

#[derive(Debug, Clone, PartialEq)]
pub struct BoostTrace<F> {
    pub rounds: Vec<RoundRecord<F>>,
    pub stop: StopReason,
}

impl<F: Scalar> BoostTrace<F> {
    pub const CSV_HEADER: &'static str = "round,epsilon,alpha,min_margin";

    pub fn write_csv<W: Write>(&self, mut out: W) -> Result<()> {
        writeln!(out, "{}", Self::CSV_HEADER)?;
        for r in &self.rounds {
            writeln!(out, "{},{},{},{}", r.round, r.epsilon, r.alpha, r.min_margin)?;
        }
        Ok(())
    }

    pub fn last_min_margin(&self) -> Option<F> {
        self.rounds.last().map(|r| r.min_margin)
    }
}

/// `½·ln((1-ε̂)/ε̂)` with ε̂ clamped to `[floor, 1 - floor]`.
pub fn alpha_for<F: Scalar>(epsilon: F, floor: F) -> F {
    let e = epsilon.max(floor).min(F::one() - floor);
    F::lit(0.5) * ((F::one() - e) / e).ln()
}

/// State visible to an observer after each accepted round.
pub struct RoundView<'a, F, H> {
    pub record: RoundRecord<F>,
    pub hypothesis: &'a H,
    /// The distribution the hypothesis was trained on.
    pub before: &'a WeightDistribution<F>,
    /// The reweighted distribution for the next round. `None` after a perfect
    /// round that ends training.
    pub after: Option<&'a WeightDistribution<F>>,
}

/// Runs AdaBoost and returns the voter of accepted rounds with its trace.
pub fn adaboost<F, W>(
    data: &Dataset<F>,
    weak: &W,
    cfg: &BoostConfig,
) -> Result<(Voter<F, W::Hypothesis>, BoostTrace<F>)>
where
    F: Scalar,
    W: WeakLearner<F> + ?Sized,
{
    adaboost_observed(data, weak, cfg, |_| {})
}

/// [`adaboost`], calling `observe` after every accepted round.
pub fn adaboost_observed<F, W>(
    data: &Dataset<F>,
    weak: &W,
    cfg: &BoostConfig,
    mut observe: impl FnMut(&RoundView<'_, F, W::Hypothesis>),
) -> Result<(Voter<F, W::Hypothesis>, BoostTrace<F>)>
where
    F: Scalar,
    W: WeakLearner<F> + ?Sized,
{
    cfg.validate()?;
    let m = data.n_rows();
    let floor = F::lit(cfg.epsilon_floor);
    let half = F::lit(0.5);

    let mut dist = WeightDistribution::uniform(m);
    let mut terms: Vec<(F, W::Hypothesis)> = Vec::with_capacity(cfg.rounds);
    let mut records = Vec::with_capacity(cfg.rounds);
    // unnormalized y_i * f(x_i)
    let mut scores = vec![F::zero(); m];
    let mut mass = F::zero();
    let mut stop = StopReason::RoundLimit;

    for round in 1..=cfg.rounds {
        let h = weak.learn(data, &dist)?;
        let epsilon = weighted_error(&h, data, &dist)?;
        if epsilon >= half {
            stop = StopReason::NoAdvantage;
            break;
        }
        let alpha = alpha_for(epsilon, floor);

        let agree: Vec<bool> = data.rows().map(|(x, y)| h.predict(x) == y).collect();
        mass += alpha;
        for (s, &ok) in scores.iter_mut().zip(&agree) {
            if ok {
                *s += alpha
            } else {
                *s -= alpha
            }
        }
        let min_margin = scores.iter().copied().fold(F::infinity(), F::min) / mass;
        let record = RoundRecord { round, epsilon, alpha, min_margin };
        records.push(record);

        if epsilon == F::zero() && cfg.stop_on_perfect {
            observe(&RoundView { record, hypothesis: &h, before: &dist, after: None });
            terms.push((alpha, h));
            stop = StopReason::Perfect;
            break;
        }

        let (up, down) = (alpha.exp(), (-alpha).exp());
        let next = WeightDistribution::normalized(
            dist.weights().iter().zip(&agree).map(|(&w, &ok)| if ok { w * down } else { w * up }).collect(),
        )?;
        observe(&RoundView { record, hypothesis: &h, before: &dist, after: Some(&next) });
        terms.push((alpha, h));
        dist = next;
    }

    if terms.is_empty() {
        return Err(Error::NoAdvantage);
    }
    Ok((Voter::new(terms)?, BoostTrace { rounds: records, stop }))
}

/// Margins of a trained voter on its own training set.
pub fn training_margin_profile<F: Scalar, H: Hypothesis<F>>(voter: &Voter<F, H>, data: &Dataset<F>) -> MarginReport<F> {
    voter.margins(data)
}

/// Fraction of training rows the voter misclassifies.
pub fn training_error<F: Scalar, H: Hypothesis<F>>(voter: &Voter<F, H>, data: &Dataset<F>) -> F {
    crate::voting::test_error(|x| voter.predict(x), data)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::data::Label;
    use crate::weak::{Stump, StumpLearner};
    use approx::assert_relative_eq;

    const P: Label = Label::Positive;
    const N: Label = Label::Negative;

    fn four_points() -> Dataset<f64> {
        Dataset::from_rows(&[vec![1.0], vec![2.0], vec![3.0], vec![4.0]], vec![N, N, P, P]).unwrap()
    }

    #[test]
    fn alpha_closed_form() {
        assert_relative_eq!(alpha_for(0.25, 1e-10), 0.5 * 3.0_f64.ln(), epsilon = 1e-15);
        assert_relative_eq!(alpha_for(0.25, 1e-10), 0.549306, epsilon = 1e-6);
        assert_relative_eq!(alpha_for(0.0, 1e-10), 0.5 * ((1.0 - 1e-10) / 1e-10_f64).ln());
        assert_eq!(alpha_for(0.5, 1e-10), 0.0);
    }

    #[test]
    fn separable_data_stops_after_one_round() {
        let d = four_points();
        let (v, trace) = adaboost(&d, &StumpLearner, &BoostConfig::default()).unwrap();
        assert_eq!(v.len(), 1);
        assert_eq!(trace.stop, StopReason::Perfect);
        assert_eq!(training_error(&v, &d), 0.0);
        assert_eq!(training_margin_profile(&v, &d).min_margin, 1.0);
    }

    /// Always returns the same stump, however bad.
    struct Fixed(Stump<f64>);
    impl WeakLearner<f64> for Fixed {
        type Hypothesis = Stump<f64>;
        fn learn(&self, _: &Dataset<f64>, _: &WeightDistribution<f64>) -> Result<Stump<f64>> {
            Ok(self.0)
        }
    }

    #[test]
    fn zero_advantage_first_round_is_an_error() {
        let d = four_points();
        // wrong on every row
        let all_wrong = Fixed(Stump { feature: 0, threshold: 2.5, polarity: P });
        assert!(matches!(adaboost(&d, &all_wrong, &BoostConfig::default()), Err(Error::NoAdvantage)));
    }

    #[test]
    fn repeated_hypothesis_is_rejected_after_reweighting() {
        // error 1/4 first round; after the update it is exactly 1/2
        let d = four_points();
        let s = Fixed(Stump { feature: 0, threshold: 1.5, polarity: N });
        let (v, trace) = adaboost(&d, &s, &BoostConfig::default()).unwrap();
        assert_eq!(v.len(), 1);
        assert_eq!(trace.stop, StopReason::NoAdvantage);
        assert_relative_eq!(trace.rounds[0].epsilon, 0.25);
        assert_relative_eq!(trace.rounds[0].alpha, 0.5 * 3.0_f64.ln(), epsilon = 1e-15);
    }

    #[test]
    fn trace_csv() {
        let d = four_points();
        let (_, trace) = adaboost(&d, &StumpLearner, &BoostConfig::default()).unwrap();
        let mut buf = Vec::new();
        trace.write_csv(&mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let mut lines = text.lines();
        assert_eq!(lines.next(), Some("round,epsilon,alpha,min_margin"));
        let first = lines.next().unwrap();
        assert!(first.starts_with("1,0,"), "{first}");
    }

    #[test]
    fn config_validation() {
        assert!(BoostConfig { rounds: 0, ..Default::default() }.validate().is_err());
        assert!(BoostConfig { epsilon_floor: 0.5, ..Default::default() }.validate().is_err());
        assert!(BoostConfig::default().validate().is_ok());
    }
}
