//! Meta-boosters that run AdaBoost on several training sets drawn from one
//! sample and combine the resulting voters by unweighted majority.
//!
//! * [`majority_of_k`]: k disjoint blocks of a shuffled sample.
//! * [`larsen_ritzert`]: the list produced by recursive [`subsample`].
//! * [`bagged_adaboost`]: with-replacement bags.
//!
//! Member trainings run on the rayon pool. Every random draw uses a seed
//! derived from `(master_seed, algorithm, member index)`, so results do not
//! depend on the number of worker threads.

mod model;

pub use model::{HypothesisRecord, ModelFile, TermRecord, ToRecord, VoterRecord, MODEL_FORMAT};

use std::fmt;
use std::str::FromStr;

use rand::seq::{index, SliceRandom};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::boost::{adaboost, BoostConfig, BoostTrace};
use crate::data::Dataset;
use crate::error::{Error, Result};
use crate::scalar::Scalar;
use crate::voting::{Ensemble, Voter};
use crate::weak::WeakLearner;

/// Ordered row indices into a parent dataset. Duplicates are allowed.
#[derive(Debug, Clone, Default, PartialEq, Eq, Hash)]
pub struct IndexSet(Vec<usize>);

impl IndexSet {
    pub fn new(indices: Vec<usize>) -> Self {
        IndexSet(indices)
    }

    pub fn range(n: usize) -> Self {
        IndexSet((0..n).collect())
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn as_slice(&self) -> &[usize] {
        &self.0
    }

    pub fn into_vec(self) -> Vec<usize> {
        self.0
    }

    /// `self` followed by each of `others`.
    pub fn concat<'a>(&self, others: impl IntoIterator<Item = &'a IndexSet>) -> IndexSet {
        let mut out = self.0.clone();
        for o in others {
            out.extend_from_slice(&o.0);
        }
        IndexSet(out)
    }
}

impl From<Vec<usize>> for IndexSet {
    fn from(v: Vec<usize>) -> Self {
        IndexSet(v)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Algorithm {
    #[serde(rename = "adaboost", alias = "ada")]
    AdaBoost,
    #[serde(rename = "majority_of_k", alias = "maj")]
    MajorityOfK,
    #[serde(rename = "larsen_ritzert", alias = "lr")]
    LarsenRitzert,
    #[serde(rename = "bagged_adaboost", alias = "bag")]
    BaggedAdaBoost,
}

impl Algorithm {
    pub const ALL: [Algorithm; 4] =
        [Algorithm::AdaBoost, Algorithm::MajorityOfK, Algorithm::LarsenRitzert, Algorithm::BaggedAdaBoost];

    pub fn name(self) -> &'static str {
        match self {
            Algorithm::AdaBoost => "adaboost",
            Algorithm::MajorityOfK => "majority_of_k",
            Algorithm::LarsenRitzert => "larsen_ritzert",
            Algorithm::BaggedAdaBoost => "bagged_adaboost",
        }
    }
}

impl fmt::Display for Algorithm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Algorithm {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "adaboost" | "ada" => Ok(Algorithm::AdaBoost),
            "majority_of_k" | "maj" | "majority" => Ok(Algorithm::MajorityOfK),
            "larsen_ritzert" | "lr" => Ok(Algorithm::LarsenRitzert),
            "bagged_adaboost" | "bag" | "bagging" => Ok(Algorithm::BaggedAdaBoost),
            other => Err(Error::Config(format!("unknown algorithm `{other}`"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MetaConfig {
    /// Number of blocks for Majority-of-K.
    pub k: usize,
    pub boost: BoostConfig,
    /// Bag size as a fraction of the sample.
    pub bag_fraction: f64,
    /// Number of bags; `None` means `ceil(ln(m / delta))`.
    pub bag_count: Option<usize>,
    pub delta: f64,
    /// Maximum number of sub-samples Larsen–Ritzert trains on.
    pub lr_cap: Option<usize>,
    pub master_seed: u64,
}

impl Default for MetaConfig {
    fn default() -> Self {
        MetaConfig {
            k: 5,
            boost: BoostConfig::default(),
            bag_fraction: 0.95,
            bag_count: None,
            delta: 0.01,
            lr_cap: None,
            master_seed: 0,
        }
    }
}

impl MetaConfig {
    pub fn validate(&self) -> Result<()> {
        self.boost.validate()?;
        if self.k == 0 {
            return Err(Error::Config("k must be at least 1".into()));
        }
        if !(self.bag_fraction > 0.0 && self.bag_fraction <= 1.0) {
            return Err(Error::Config(format!("bag_fraction {} outside (0, 1]", self.bag_fraction)));
        }
        if self.bag_count == Some(0) {
            return Err(Error::Config("bag_count must be at least 1".into()));
        }
        if !(self.delta > 0.0 && self.delta < 1.0) {
            return Err(Error::Config(format!("delta {} outside (0, 1)", self.delta)));
        }
        if self.lr_cap == Some(0) {
            return Err(Error::Config("lr_cap must be at least 1".into()));
        }
        Ok(())
    }
}

/// Per-member training summary.
#[derive(Debug, Clone, PartialEq)]
pub struct Member<F> {
    /// Rows of the parent dataset this member was trained on.
    pub rows: IndexSet,
    pub trace: BoostTrace<F>,
}

/// A trained ensemble with the training record of each voter.
#[derive(Debug, Clone)]
pub struct MetaFit<F, H> {
    pub algorithm: Algorithm,
    pub ensemble: Ensemble<F, H>,
    pub members: Vec<Member<F>>,
}

impl<F: Scalar, H> MetaFit<F, H> {
    /// Smallest final training margin over all members.
    pub fn min_train_margin(&self) -> F {
        self.members
            .iter()
            .filter_map(|m| m.trace.last_min_margin())
            .fold(F::infinity(), F::min)
    }
}

const GOLDEN: u64 = 0x9e37_79b9_7f4a_7c15;

fn splitmix(mut z: u64) -> u64 {
    z = z.wrapping_add(GOLDEN);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// Seed for member `index` of stream `tag` under `master`. Stable across
/// platforms and releases.
pub fn derive_seed(master: u64, tag: &str, index: u64) -> u64 {
    // FNV-1a over the tag
    let mut h: u64 = 0xcbf2_9ce4_8422_2325;
    for b in tag.bytes() {
        h ^= u64::from(b);
        h = h.wrapping_mul(0x0100_0000_01b3);
    }
    splitmix(splitmix(splitmix(master) ^ h) ^ index)
}

pub(crate) fn rng_for(master: u64, tag: &str, index: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(derive_seed(master, tag, index))
}

/// Sizes of `k` contiguous blocks of `m` rows; the first `m mod k` get one extra.
pub fn block_sizes(m: usize, k: usize) -> Vec<usize> {
    let (base, extra) = (m / k, m % k);
    (0..k).map(|i| base + usize::from(i < extra)).collect()
}

fn split_blocks(indices: &[usize], k: usize) -> Vec<IndexSet> {
    let mut start = 0;
    block_sizes(indices.len(), k)
        .into_iter()
        .map(|n| {
            let block = IndexSet(indices[start..start + n].to_vec());
            start += n;
            block
        })
        .collect()
}

/// Disjoint blocks used by [`majority_of_k`]: a seeded shuffle of all rows cut
/// into `k` contiguous pieces.
pub fn majority_partition(m: usize, k: usize, master_seed: u64) -> Result<Vec<IndexSet>> {
    if k == 0 || m < k {
        return Err(Error::InsufficientSamples { rows: m, k });
    }
    let mut order: Vec<usize> = (0..m).collect();
    order.shuffle(&mut rng_for(master_seed, Algorithm::MajorityOfK.name(), 0));
    Ok(split_blocks(&order, k))
}

/// Recursive sub-sampling: returns `[s ∪ t]` when `|s| < 4`, otherwise splits
/// `s` into quarters `S0..S3` and concatenates the lists for
/// `(S0, t ∪ S2 ∪ S3)`, `(S0, t ∪ S1 ∪ S3)`, `(S0, t ∪ S1 ∪ S2)`.
pub fn subsample(s: &IndexSet, t: &IndexSet) -> Vec<IndexSet> {
    let mut out = Vec::new();
    subsample_into(s, t, &mut out);
    out
}

fn subsample_into(s: &IndexSet, t: &IndexSet, out: &mut Vec<IndexSet>) {
    if s.len() < 4 {
        out.push(s.concat([t]));
        return;
    }
    let q = split_blocks(s.as_slice(), 4);
    subsample_into(&q[0], &t.concat([&q[2], &q[3]]), out);
    subsample_into(&q[0], &t.concat([&q[1], &q[3]]), out);
    subsample_into(&q[0], &t.concat([&q[1], &q[2]]), out);
}

/// The training sets [`larsen_ritzert`] uses: the full sub-sample list, or
/// `lr_cap` of them drawn without replacement (kept in list order).
pub fn larsen_ritzert_sets(m: usize, lr_cap: Option<usize>, master_seed: u64) -> Vec<IndexSet> {
    let all = subsample(&IndexSet::range(m), &IndexSet::default());
    match lr_cap {
        Some(cap) if cap < all.len() => {
            let mut rng = rng_for(master_seed, Algorithm::LarsenRitzert.name(), 0);
            let mut picked = index::sample(&mut rng, all.len(), cap).into_vec();
            picked.sort_unstable();
            picked.into_iter().map(|i| all[i].clone()).collect()
        }
        _ => all,
    }
}

/// `ceil(ln(m / delta))`, at least 1.
pub fn default_bag_count(m: usize, delta: f64) -> usize {
    ((m as f64 / delta).ln().ceil() as usize).max(1)
}

/// Number of draws per bag: `round(fraction * m)`, at least 1.
pub fn bag_size(m: usize, fraction: f64) -> usize {
    ((fraction * m as f64).round() as usize).max(1)
}

/// With-replacement bags used by [`bagged_adaboost`].
pub fn bags(m: usize, cfg: &MetaConfig) -> Vec<IndexSet> {
    let count = cfg.bag_count.unwrap_or_else(|| default_bag_count(m, cfg.delta));
    let size = bag_size(m, cfg.bag_fraction);
    (0..count)
        .map(|t| {
            let mut rng = rng_for(cfg.master_seed, Algorithm::BaggedAdaBoost.name(), t as u64);
            IndexSet((0..size).map(|_| rng.random_range(0..m)).collect())
        })
        .collect()
}

/// Trains one AdaBoost voter per index set, in parallel, preserving order.
pub fn train_members<F, W>(
    algorithm: Algorithm,
    data: &Dataset<F>,
    weak: &W,
    boost: &BoostConfig,
    sets: Vec<IndexSet>,
) -> Result<MetaFit<F, W::Hypothesis>>
where
    F: Scalar,
    W: WeakLearner<F> + ?Sized,
{
    let trained: Vec<(Voter<F, W::Hypothesis>, Member<F>)> = sets
        .into_par_iter()
        .map(|rows| {
            let subset = data.select(rows.as_slice())?;
            let (voter, trace) = adaboost(&subset, weak, boost)?;
            Ok((voter, Member { rows, trace }))
        })
        .collect::<Result<_>>()?;
    let (voters, members) = trained.into_iter().unzip();
    Ok(MetaFit { algorithm, ensemble: Ensemble::new(voters)?, members })
}

/// Majority vote of AdaBoost voters trained on `k` disjoint blocks.
pub fn majority_of_k<F, W>(data: &Dataset<F>, weak: &W, cfg: &MetaConfig) -> Result<MetaFit<F, W::Hypothesis>>
where
    F: Scalar,
    W: WeakLearner<F> + ?Sized,
{
    cfg.validate()?;
    let blocks = majority_partition(data.n_rows(), cfg.k, cfg.master_seed)?;
    train_members(Algorithm::MajorityOfK, data, weak, &cfg.boost, blocks)
}

/// Majority vote of AdaBoost voters trained on the recursive sub-samples.
pub fn larsen_ritzert<F, W>(data: &Dataset<F>, weak: &W, cfg: &MetaConfig) -> Result<MetaFit<F, W::Hypothesis>>
where
    F: Scalar,
    W: WeakLearner<F> + ?Sized,
{
    cfg.validate()?;
    let sets = larsen_ritzert_sets(data.n_rows(), cfg.lr_cap, cfg.master_seed);
    train_members(Algorithm::LarsenRitzert, data, weak, &cfg.boost, sets)
}

/// Majority vote of AdaBoost voters trained on with-replacement bags.
pub fn bagged_adaboost<F, W>(data: &Dataset<F>, weak: &W, cfg: &MetaConfig) -> Result<MetaFit<F, W::Hypothesis>>
where
    F: Scalar,
    W: WeakLearner<F> + ?Sized,
{
    cfg.validate()?;
    train_members(Algorithm::BaggedAdaBoost, data, weak, &cfg.boost, bags(data.n_rows(), cfg))
}

/// Plain AdaBoost on all rows, wrapped as a one-voter ensemble.
pub fn single_adaboost<F, W>(data: &Dataset<F>, weak: &W, cfg: &MetaConfig) -> Result<MetaFit<F, W::Hypothesis>>
where
    F: Scalar,
    W: WeakLearner<F> + ?Sized,
{
    cfg.validate()?;
    train_members(Algorithm::AdaBoost, data, weak, &cfg.boost, vec![IndexSet::range(data.n_rows())])
}

/// Dispatches to the learner for `algorithm`.
pub fn train<F, W>(algorithm: Algorithm, data: &Dataset<F>, weak: &W, cfg: &MetaConfig) -> Result<MetaFit<F, W::Hypothesis>>
where
    F: Scalar,
    W: WeakLearner<F> + ?Sized,
{
    match algorithm {
        Algorithm::AdaBoost => single_adaboost(data, weak, cfg),
        Algorithm::MajorityOfK => majority_of_k(data, weak, cfg),
        Algorithm::LarsenRitzert => larsen_ritzert(data, weak, cfg),
        Algorithm::BaggedAdaBoost => bagged_adaboost(data, weak, cfg),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::data::Label;
    use crate::weak::StumpLearner;
    use std::collections::BTreeSet;

    fn sizes(sets: &[IndexSet]) -> Vec<usize> {
        sets.iter().map(IndexSet::len).collect()
    }

    #[test]
    fn block_size_rules() {
        assert_eq!(block_sizes(10, 5), vec![2; 5]);
        assert_eq!(block_sizes(11, 5), vec![3, 2, 2, 2, 2]);
        assert_eq!(block_sizes(13, 4), vec![4, 3, 3, 3]);
    }

    #[test]
    fn majority_partition_covers_disjointly() {
        let blocks = majority_partition(11, 5, 42).unwrap();
        assert_eq!(sizes(&blocks), vec![3, 2, 2, 2, 2]);
        let all: Vec<usize> = blocks.iter().flat_map(|b| b.as_slice().iter().copied()).collect();
        assert_eq!(all.iter().copied().collect::<BTreeSet<_>>(), (0..11).collect());
        assert_eq!(all.len(), 11);
        assert!(matches!(majority_partition(4, 5, 0), Err(Error::InsufficientSamples { .. })));
    }

    #[test]
    fn subsample_small_cases() {
        let empty = IndexSet::default();
        assert_eq!(subsample(&IndexSet::range(3), &empty), vec![IndexSet::range(3)]);
        let four = subsample(&IndexSet::range(4), &empty);
        assert_eq!(four, vec![
            IndexSet::new(vec![0, 2, 3]),
            IndexSet::new(vec![0, 1, 3]),
            IndexSet::new(vec![0, 1, 2]),
        ]);
        let sixteen = subsample(&IndexSet::range(16), &empty);
        assert_eq!(sizes(&sixteen), vec![11; 9]);
    }

    #[test]
    fn lr_cap_semantics() {
        assert_eq!(larsen_ritzert_sets(64, Some(9), 1).len(), 9);
        assert_eq!(larsen_ritzert_sets(64, None, 1).len(), 27);
        assert_eq!(larsen_ritzert_sets(64, Some(100), 1).len(), 27);
        assert_eq!(larsen_ritzert_sets(64, Some(9), 1), larsen_ritzert_sets(64, Some(9), 1));
    }

    #[test]
    fn bag_defaults() {
        assert_eq!(default_bag_count(100, 0.01), 10);
        assert_eq!(bag_size(1000, 0.95), 950);
        let cfg = MetaConfig { bag_count: Some(3), ..Default::default() };
        let b = bags(1000, &cfg);
        assert_eq!(sizes(&b), vec![950; 3]);
        assert!(b.iter().all(|s| s.as_slice().iter().all(|&i| i < 1000)));
        assert_ne!(b[0], b[1]);
    }

    #[test]
    fn seeds_are_stable_and_distinct() {
        assert_eq!(derive_seed(1, "a", 0), derive_seed(1, "a", 0));
        assert_ne!(derive_seed(1, "a", 0), derive_seed(1, "a", 1));
        assert_ne!(derive_seed(1, "a", 0), derive_seed(1, "b", 0));
        assert_ne!(derive_seed(1, "a", 0), derive_seed(2, "a", 0));
    }

    #[test]
    fn algorithm_names_round_trip() {
        for a in Algorithm::ALL {
            assert_eq!(a.name().parse::<Algorithm>().unwrap(), a);
        }
        assert_eq!("maj".parse::<Algorithm>().unwrap(), Algorithm::MajorityOfK);
        assert!("svm".parse::<Algorithm>().is_err());
    }

    #[test]
    fn config_validation() {
        assert!(MetaConfig { k: 0, ..Default::default() }.validate().is_err());
        assert!(MetaConfig { bag_fraction: 0.0, ..Default::default() }.validate().is_err());
        assert!(MetaConfig { bag_fraction: 1.0, ..Default::default() }.validate().is_ok());
    }

    #[test]
    fn lr_on_four_points() {
        let d = Dataset::from_rows(
            &[vec![1.0], vec![2.0], vec![3.0], vec![4.0]],
            vec![Label::Negative, Label::Negative, Label::Positive, Label::Positive],
        )
        .unwrap();
        let fit = larsen_ritzert(&d, &StumpLearner, &MetaConfig::default()).unwrap();
        assert_eq!(fit.ensemble.len(), 3);
        assert!(d.rows().all(|(x, y)| fit.ensemble.predict(x) == y));
    }
}
