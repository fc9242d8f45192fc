//! Weak learners: a query `(Dataset, WeightDistribution) -> Hypothesis`.

mod adversarial;
mod stump;

pub use adversarial::{
    generate_adversarial_dataset, AdversarialConfig, AdversarialHypothesis, AdversarialId,
    AdversarialLearner, AdversarialUniverse, QueryOutcome, ADVERSARIAL_SAMPLES, DOMAIN_SIZE,
    PROBE_SIZE, TAIL_SIZE,
};
pub use stump::{train_stump, Stump, StumpLearner};

use crate::data::{Dataset, WeightDistribution};
use crate::error::Result;
use crate::scalar::Scalar;
use crate::voting::Hypothesis;

/// Oracle returning a hypothesis for a weighing of the training rows.
///
/// Implementations must tolerate concurrent calls from independent boosting
/// runs.
pub trait WeakLearner<F: Scalar>: Sync {
    type Hypothesis: Hypothesis<F> + Clone + Send + Sync;

    fn learn(&self, data: &Dataset<F>, dist: &WeightDistribution<F>) -> Result<Self::Hypothesis>;
}

impl<F: Scalar, W: WeakLearner<F> + ?Sized> WeakLearner<F> for &W {
    type Hypothesis = W::Hypothesis;

    fn learn(&self, data: &Dataset<F>, dist: &WeightDistribution<F>) -> Result<Self::Hypothesis> {
        (**self).learn(data, dist)
    }
}
