//! Adversarial weak learner over the finite universe `{1, ..., 350}`.
//!
//! Every universe point has true label `+1`. A query computes the probe set
//! `T` (the first points in natural order that carry zero training mass) and
//! answers with the fixed-pool hypothesis that does worst on `T` while still
//! meeting the `1/2 - gamma` error bound under the query weighing. When no
//! pool member qualifies, it answers with `h0`, which is correct on every
//! point except the last [`TAIL_SIZE`].

use std::sync::atomic::{AtomicBool, AtomicUsize, Ordering};
use std::sync::Arc;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::data::{Dataset, Label, WeightDistribution};
use crate::error::{Error, Result};
use crate::scalar::Scalar;
use crate::voting::{weighted_error, Hypothesis};

use super::WeakLearner;

pub const DOMAIN_SIZE: usize = 350;
pub const TAIL_SIZE: usize = 20;
pub const PROBE_SIZE: usize = 20;
pub const ADVERSARIAL_SAMPLES: usize = 1024;

/// `n` points drawn uniformly from the universe, all labeled `+1`, in a single column.
fn draw_points<F: Scalar>(n: usize, seed: u64) -> Dataset<F> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let features = (0..n).map(|_| F::from_count(rng.random_range(1..=DOMAIN_SIZE))).collect();
    Dataset::from_flat(features, 1, vec![Label::Positive; n]).expect("valid adversarial sample")
}

/// The 1024-row adversarial training set for `seed`.
pub fn generate_adversarial_dataset<F: Scalar>(seed: u64) -> Dataset<F> {
    draw_points(ADVERSARIAL_SAMPLES, seed)
}

/// Universe point held by a row, if the row's value is one.
fn point_of<F: Scalar>(row: &[F]) -> Option<usize> {
    let v = row[0];
    let p = v.to_usize()?;
    (F::from_count(p) == v && (1..=DOMAIN_SIZE).contains(&p)).then_some(p)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AdversarialConfig {
    pub gamma: f64,
    pub pool_size: usize,
    /// Probability that a pool hypothesis labels a point `+1`; `None` means `1/2 + 2*gamma`.
    pub plus_probability: Option<f64>,
    pub pool_seed: u64,
}

impl Default for AdversarialConfig {
    fn default() -> Self {
        AdversarialConfig { gamma: 0.1, pool_size: 100, plus_probability: None, pool_seed: 0 }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum AdversarialId {
    Pool(usize),
    H0,
}

/// A hypothesis of the adversarial hypothesis set. Rows outside the universe
/// are predicted `-1`.
#[derive(Debug, Clone)]
pub struct AdversarialHypothesis {
    id: AdversarialId,
    table: Arc<[Label]>,
}

impl AdversarialHypothesis {
    pub fn id(&self) -> AdversarialId {
        self.id
    }

    /// Label assigned to universe point `x` (1-based).
    pub fn at(&self, x: usize) -> Label {
        self.table[x - 1]
    }
}

impl PartialEq for AdversarialHypothesis {
    fn eq(&self, other: &Self) -> bool {
        self.id == other.id && self.table == other.table
    }
}

impl<F: Scalar> Hypothesis<F> for AdversarialHypothesis {
    fn predict(&self, row: &[F]) -> Label {
        point_of(row).map_or(Label::Negative, |x| self.at(x))
    }
}

/// Result of one adversarial query.
#[derive(Debug, Clone)]
pub struct QueryOutcome<F> {
    pub hypothesis: AdversarialHypothesis,
    /// Probe set `T`, ascending.
    pub probe: Vec<usize>,
    pub weighted_error: F,
    pub fallback: bool,
    /// Whether the answer meets the `1/2 - gamma` bound.
    pub within_bound: bool,
}

/// Fixed hypothesis pool plus `h0` over the universe.
#[derive(Debug, Clone)]
pub struct AdversarialUniverse {
    gamma: f64,
    pool: Vec<AdversarialHypothesis>,
    h0: AdversarialHypothesis,
}

impl AdversarialUniverse {
    pub fn new(config: &AdversarialConfig) -> Result<Self> {
        let p = config.plus_probability.unwrap_or(0.5 + 2.0 * config.gamma);
        if !(0.0..=1.0).contains(&p) {
            return Err(Error::Config(format!("+1 probability {p} outside [0, 1]")));
        }
        let mut rng = ChaCha8Rng::seed_from_u64(config.pool_seed);
        let tables = (0..config.pool_size)
            .map(|_| {
                (0..DOMAIN_SIZE)
                    .map(|_| if rng.random_bool(p) { Label::Positive } else { Label::Negative })
                    .collect()
            })
            .collect();
        Self::with_pool(config.gamma, tables)
    }

    /// Universe with an explicit pool; each table lists labels for points 1..=350.
    pub fn with_pool(gamma: f64, tables: Vec<Vec<Label>>) -> Result<Self> {
        if !(gamma > 0.0 && gamma < 0.5) {
            return Err(Error::Config(format!("gamma {gamma} outside (0, 0.5)")));
        }
        let pool = tables
            .into_iter()
            .enumerate()
            .map(|(i, t)| {
                if t.len() != DOMAIN_SIZE {
                    return Err(Error::Config(format!(
                        "pool hypothesis {i} has {} labels, expected {DOMAIN_SIZE}",
                        t.len()
                    )));
                }
                Ok(AdversarialHypothesis { id: AdversarialId::Pool(i), table: t.into() })
            })
            .collect::<Result<Vec<_>>>()?;
        let h0 = (1..=DOMAIN_SIZE)
            .map(|x| if x <= DOMAIN_SIZE - TAIL_SIZE { Label::Positive } else { Label::Negative })
            .collect();
        Ok(AdversarialUniverse {
            gamma,
            pool,
            h0: AdversarialHypothesis { id: AdversarialId::H0, table: h0 },
        })
    }

    pub fn gamma(&self) -> f64 {
        self.gamma
    }

    /// Largest weighted error a weak-learner answer may have: `1/2 - gamma`.
    pub fn max_error(&self) -> f64 {
        0.5 - self.gamma
    }

    pub fn pool(&self) -> &[AdversarialHypothesis] {
        &self.pool
    }

    pub fn h0(&self) -> &AdversarialHypothesis {
        &self.h0
    }

    pub fn hypothesis(&self, id: AdversarialId) -> Option<&AdversarialHypothesis> {
        match id {
            AdversarialId::H0 => Some(&self.h0),
            AdversarialId::Pool(i) => self.pool.get(i),
        }
    }

    /// Universe points with exactly zero total mass, ascending, at most [`PROBE_SIZE`].
    pub fn probe_set<F: Scalar>(&self, data: &Dataset<F>, dist: &WeightDistribution<F>) -> Result<Vec<usize>> {
        dist.check_len(data.n_rows())?;
        let mut mass = vec![F::zero(); DOMAIN_SIZE + 1];
        for (i, (row, _)) in data.rows().enumerate() {
            let x = point_of(row).ok_or_else(|| {
                Error::WeakLearner(format!("row {i} value {} is not a universe point", row[0]))
            })?;
            mass[x] += dist.weight(i);
        }
        Ok((1..=DOMAIN_SIZE).filter(|&x| mass[x] == F::zero()).take(PROBE_SIZE).collect())
    }

    /// Answers one weak-learner query.
    pub fn query<F: Scalar>(&self, data: &Dataset<F>, dist: &WeightDistribution<F>) -> Result<QueryOutcome<F>> {
        let probe = self.probe_set(data, dist)?;
        let bound = F::lit(self.max_error());

        // (accuracy-on-probe numerator, pool index); compare counts to avoid division
        let mut worst: Option<(usize, usize, F)> = None;
        for (i, h) in self.pool.iter().enumerate() {
            let correct = probe.iter().filter(|&&x| h.at(x) == Label::Positive).count();
            // accuracy on T <= 1/2 - gamma; an empty T constrains nothing
            if !probe.is_empty() && correct as f64 > self.max_error() * probe.len() as f64 {
                continue;
            }
            if worst.is_some_and(|(c, _, _)| correct >= c) {
                continue;
            }
            let err = weighted_error(h, data, dist)?;
            if err <= bound {
                worst = Some((correct, i, err));
            }
        }

        Ok(match worst {
            Some((_, i, err)) => QueryOutcome {
                hypothesis: self.pool[i].clone(),
                probe,
                weighted_error: err,
                fallback: false,
                within_bound: true,
            },
            None => {
                let err = weighted_error(&self.h0, data, dist)?;
                QueryOutcome {
                    hypothesis: self.h0.clone(),
                    probe,
                    weighted_error: err,
                    fallback: true,
                    within_bound: err <= bound,
                }
            }
        })
    }
}

/// [`AdversarialUniverse`] as a [`WeakLearner`], counting queries, `h0`
/// fallbacks and answers that break the error bound.
#[derive(Debug)]
pub struct AdversarialLearner {
    universe: Arc<AdversarialUniverse>,
    queries: AtomicUsize,
    fallbacks: AtomicUsize,
    violations: AtomicUsize,
    short_probe_warned: AtomicBool,
}

impl AdversarialLearner {
    pub fn new(universe: Arc<AdversarialUniverse>) -> Self {
        AdversarialLearner {
            universe,
            queries: AtomicUsize::new(0),
            fallbacks: AtomicUsize::new(0),
            violations: AtomicUsize::new(0),
            short_probe_warned: AtomicBool::new(false),
        }
    }

    pub fn universe(&self) -> &AdversarialUniverse {
        &self.universe
    }

    pub fn queries(&self) -> usize {
        self.queries.load(Ordering::Relaxed)
    }

    pub fn fallbacks(&self) -> usize {
        self.fallbacks.load(Ordering::Relaxed)
    }

    /// Fallback answers whose weighted error exceeds `1/2 - gamma`.
    pub fn violations(&self) -> usize {
        self.violations.load(Ordering::Relaxed)
    }
}

impl<F: Scalar> WeakLearner<F> for AdversarialLearner {
    type Hypothesis = AdversarialHypothesis;

    fn learn(&self, data: &Dataset<F>, dist: &WeightDistribution<F>) -> Result<AdversarialHypothesis> {
        let out = self.universe.query(data, dist)?;
        self.queries.fetch_add(1, Ordering::Relaxed);
        if out.probe.len() < PROBE_SIZE && !self.short_probe_warned.swap(true, Ordering::Relaxed) {
            log::warn!(
                "only {} zero-mass universe points available for the probe set (wanted {PROBE_SIZE})",
                out.probe.len()
            );
        }
        if out.fallback {
            self.fallbacks.fetch_add(1, Ordering::Relaxed);
        }
        if !out.within_bound {
            self.violations.fetch_add(1, Ordering::Relaxed);
            log::debug!("h0 fallback with weighted error {} above bound", out.weighted_error);
        }
        Ok(out.hypothesis)
    }
}
