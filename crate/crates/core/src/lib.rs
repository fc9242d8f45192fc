//! Weak-to-strong learning: AdaBoost over decision stumps, three
//! sample-optimal meta-boosters that combine several AdaBoost voters by
//! majority vote, an adversarial weak learner, and a seeded experiment
//! harness.
//!
//! All numeric code is generic over [`Scalar`] (`f32` or `f64`); the `*64`
//! aliases below fix it to `f64`, which is what the harness and CLI use.

pub mod boost;
pub mod data;
pub mod error;
pub mod harness;
pub mod meta;
pub mod scalar;
pub mod voting;
pub mod weak;

pub use boost::{adaboost, adaboost_observed, alpha_for, training_margin_profile, BoostConfig, BoostTrace, RoundRecord, StopReason};
pub use data::{sign, Dataset, Label, WeightDistribution};
pub use error::{Error, Result};
pub use meta::{
    bagged_adaboost, larsen_ritzert, majority_of_k, subsample, Algorithm, IndexSet, MetaConfig, MetaFit, ModelFile,
};
pub use scalar::Scalar;
pub use voting::{test_error, weighted_error, Ensemble, Hypothesis, MarginReport, Voter};
pub use weak::{
    generate_adversarial_dataset, train_stump, AdversarialConfig, AdversarialHypothesis, AdversarialLearner,
    AdversarialUniverse, Stump, StumpLearner, WeakLearner,
};

pub type Dataset64 = Dataset<f64>;
pub type Dataset32 = Dataset<f32>;
pub type Weights64 = WeightDistribution<f64>;
pub type Weights32 = WeightDistribution<f32>;
pub type Stump64 = Stump<f64>;
pub type Stump32 = Stump<f32>;
pub type StumpVoter64 = Voter<f64, Stump<f64>>;
pub type StumpVoter32 = Voter<f32, Stump<f32>>;
pub type StumpEnsemble64 = Ensemble<f64, Stump<f64>>;
pub type StumpEnsemble32 = Ensemble<f32, Stump<f32>>;
pub type AdversarialEnsemble64 = Ensemble<f64, AdversarialHypothesis>;
pub type MarginReport64 = MarginReport<f64>;
