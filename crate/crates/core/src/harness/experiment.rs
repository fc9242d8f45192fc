use std::collections::BTreeMap;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::sync::{Arc, Mutex};
use std::time::Instant;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::boost::BoostConfig;
use crate::data::Dataset;
use crate::error::{Error, Result};
use crate::meta::{derive_seed, train, Algorithm, MetaConfig};
use crate::voting::test_error;
use crate::weak::{
    generate_adversarial_dataset, AdversarialConfig, AdversarialLearner, AdversarialUniverse, StumpLearner,
    ADVERSARIAL_SAMPLES,
};

use super::csv_io::{load_csv, resolve_data_path, CsvOptions, LabelColumn};
use super::split::{split, split_indices, SplitSpec};
use super::synthetic::diabetes_like;

pub const RESULTS_HEADER: &str = "dataset,algorithm,k,seed,train_size,test_accuracy,wall_time_seconds,min_train_margin";

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "source", rename_all = "snake_case")]
pub enum DatasetSource {
    /// Numeric CSV; relative paths resolve against `$BOOSTLAB_DATA_DIR`.
    Csv {
        path: PathBuf,
        #[serde(default)]
        label_column: LabelColumn,
        #[serde(default = "default_positive")]
        positive: String,
    },
    /// Bundled 768×8 diabetes look-alike.
    SyntheticDiabetes {
        #[serde(default)]
        seed: u64,
    },
    /// 1024 uniform points of the 350-point universe with the adversarial weak learner.
    Adversarial,
}

fn default_positive() -> String {
    "1".into()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DatasetSpec {
    pub id: String,
    #[serde(flatten)]
    pub source: DatasetSource,
}

impl DatasetSpec {
    /// Parses `synthetic-diabetes`, `adversarial`, or `id=path.csv`.
    pub fn parse(s: &str) -> Result<Self> {
        let s = s.trim();
        match s {
            "synthetic-diabetes" | "diabetes-synthetic" => Ok(DatasetSpec {
                id: "synthetic-diabetes".into(),
                source: DatasetSource::SyntheticDiabetes { seed: 0 },
            }),
            "adversarial" => Ok(DatasetSpec { id: "adversarial".into(), source: DatasetSource::Adversarial }),
            _ => {
                let (id, path) = s.split_once('=').unwrap_or_else(|| {
                    let stem = Path::new(s).file_stem().and_then(|x| x.to_str()).unwrap_or(s);
                    (stem, s)
                });
                if path.is_empty() {
                    return Err(Error::Plan(format!("dataset `{s}` has no path")));
                }
                Ok(DatasetSpec {
                    id: id.to_string(),
                    source: DatasetSource::Csv {
                        path: path.into(),
                        label_column: LabelColumn::Last,
                        positive: default_positive(),
                    },
                })
            }
        }
    }
}

fn default_algorithms() -> Vec<Algorithm> {
    Algorithm::ALL.to_vec()
}
fn default_k_values() -> Vec<usize> {
    (3..=29).step_by(2).collect()
}
fn default_seeds() -> Vec<u64> {
    (0..5).collect()
}
fn default_rounds() -> usize {
    300
}
fn default_gamma() -> f64 {
    0.1
}
fn default_pool_size() -> usize {
    100
}
fn default_bag_fraction() -> f64 {
    0.95
}
fn default_test_fraction() -> f64 {
    0.2
}
fn default_lr_full_max_rows() -> usize {
    5000
}

/// A dataset × algorithm × k × seed sweep.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentPlan {
    pub datasets: Vec<DatasetSpec>,
    #[serde(default = "default_algorithms")]
    pub algorithms: Vec<Algorithm>,
    #[serde(default = "default_k_values")]
    pub k_values: Vec<usize>,
    #[serde(default = "default_seeds")]
    pub seeds: Vec<u64>,
    #[serde(default = "default_rounds")]
    pub rounds: usize,
    /// Advantage of the adversarial weak learner.
    #[serde(default = "default_gamma")]
    pub gamma: f64,
    #[serde(default = "default_pool_size")]
    pub pool_size: usize,
    #[serde(default = "default_bag_fraction")]
    pub bag_fraction: f64,
    #[serde(default = "default_test_fraction")]
    pub test_fraction: f64,
    /// Larsen–Ritzert trains on every sub-sample when the training set has at
    /// most this many rows (one row per seed); above it, it trains on `k`
    /// sub-samples drawn without replacement, for each swept `k`.
    #[serde(default = "default_lr_full_max_rows")]
    pub lr_full_max_rows: usize,
}

impl ExperimentPlan {
    pub fn new(datasets: Vec<DatasetSpec>) -> Self {
        ExperimentPlan {
            datasets,
            algorithms: default_algorithms(),
            k_values: default_k_values(),
            seeds: default_seeds(),
            rounds: default_rounds(),
            gamma: default_gamma(),
            pool_size: default_pool_size(),
            bag_fraction: default_bag_fraction(),
            test_fraction: default_test_fraction(),
            lr_full_max_rows: default_lr_full_max_rows(),
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.datasets.is_empty() || self.algorithms.is_empty() || self.seeds.is_empty() {
            return Err(Error::Plan("datasets, algorithms and seeds must be nonempty".into()));
        }
        if self.k_values.contains(&0) {
            return Err(Error::Plan("every k must be at least 1".into()));
        }
        if !(self.gamma > 0.0 && self.gamma < 0.5) {
            return Err(Error::Plan(format!("gamma {} outside (0, 0.5)", self.gamma)));
        }
        let mut ids: Vec<&str> = self.datasets.iter().map(|d| d.id.as_str()).collect();
        ids.sort_unstable();
        if ids.windows(2).any(|w| w[0] == w[1]) {
            return Err(Error::Plan("dataset ids must be unique".into()));
        }
        BoostConfig::with_rounds(self.rounds).validate()?;
        MetaConfig { bag_fraction: self.bag_fraction, ..MetaConfig::default() }.validate()?;
        SplitSpec { test_fraction: self.test_fraction, seed: 0 }.validate()
    }

    /// Reads TOML (`.toml`) or JSON (anything else).
    pub fn from_path(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path)?;
        let plan: Self = if path.extension().is_some_and(|e| e == "toml") {
            toml::from_str(&text).map_err(|e| Error::Plan(e.to_string()))?
        } else {
            serde_json::from_str(&text)?
        };
        plan.validate()?;
        Ok(plan)
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }
}

impl SplitSpec {
    pub(crate) fn validate(&self) -> Result<()> {
        split_indices(2, self).map(|_| ())
    }
}

/// One unit of work in a sweep.
#[derive(Debug, Clone, PartialEq)]
pub struct Cell {
    pub dataset: usize,
    pub algorithm: Algorithm,
    /// Swept k, or `None` for runs that do not depend on it.
    pub k: Option<usize>,
    pub seed: u64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ResultRow {
    pub dataset: String,
    pub algorithm: Algorithm,
    /// Number of voters in the trained ensemble (the swept k where there is one).
    pub k: usize,
    pub seed: u64,
    pub train_size: usize,
    pub test_accuracy: Option<f64>,
    pub wall_time_seconds: f64,
    pub min_train_margin: Option<f64>,
    pub error: Option<String>,
    pub weak_queries: usize,
    pub fallbacks: usize,
    pub contract_violations: usize,
}

impl ResultRow {
    pub fn csv_line(&self) -> String {
        let opt = |v: Option<f64>| v.map(|x| x.to_string()).unwrap_or_default();
        format!(
            "{},{},{},{},{},{},{},{}",
            csv_field(&self.dataset),
            self.algorithm,
            self.k,
            self.seed,
            self.train_size,
            opt(self.test_accuracy),
            self.wall_time_seconds,
            opt(self.min_train_margin)
        )
    }
}

fn csv_field(s: &str) -> String {
    if s.contains([',', '"', '\n']) {
        format!("\"{}\"", s.replace('"', "\"\""))
    } else {
        s.to_string()
    }
}

pub fn write_results_csv<W: Write>(rows: &[ResultRow], mut out: W) -> Result<()> {
    writeln!(out, "{RESULTS_HEADER}")?;
    for r in rows {
        writeln!(out, "{}", r.csv_line())?;
    }
    Ok(())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct RunOptions {
    /// Worker threads; `None` uses the available parallelism.
    pub workers: Option<usize>,
    /// Record wall time; when false the column is written as 0.
    pub timing: bool,
}

impl Default for RunOptions {
    fn default() -> Self {
        RunOptions { workers: None, timing: true }
    }
}

enum Loaded {
    Table(Dataset<f64>),
    Adversarial,
    Failed(String),
}

impl Loaded {
    fn train_size(&self, test_fraction: f64) -> Option<usize> {
        match self {
            Loaded::Table(d) => split_indices(d.n_rows(), &SplitSpec { test_fraction, seed: 0 })
                .ok()
                .map(|(tr, _)| tr.len()),
            Loaded::Adversarial => Some(ADVERSARIAL_SAMPLES),
            Loaded::Failed(_) => None,
        }
    }
}

fn load(spec: &DatasetSpec) -> Loaded {
    let loaded = match &spec.source {
        DatasetSource::Csv { path, label_column, positive } => load_csv(
            resolve_data_path(path),
            &CsvOptions { label_column: *label_column, positive: positive.clone(), max_rows: None },
        ),
        DatasetSource::SyntheticDiabetes { seed } => Ok(diabetes_like(*seed)),
        DatasetSource::Adversarial => return Loaded::Adversarial,
    };
    loaded.map_or_else(|e| Loaded::Failed(e.to_string()), Loaded::Table)
}

fn enumerate_cells(plan: &ExperimentPlan, loaded: &[Loaded]) -> Vec<Cell> {
    let mut cells = Vec::new();
    for (d, data) in loaded.iter().enumerate() {
        let lr_full = data.train_size(plan.test_fraction).is_some_and(|m| m <= plan.lr_full_max_rows);
        for &algorithm in &plan.algorithms {
            let k_independent = match algorithm {
                Algorithm::AdaBoost => true,
                Algorithm::LarsenRitzert => lr_full,
                _ => false,
            };
            let ks: Vec<Option<usize>> =
                if k_independent { vec![None] } else { plan.k_values.iter().map(|&k| Some(k)).collect() };
            for k in ks {
                for &seed in &plan.seeds {
                    cells.push(Cell { dataset: d, algorithm, k, seed });
                }
            }
        }
    }
    cells
}

/// Cells the plan expands to, given the datasets as they load now.
pub fn plan_cells(plan: &ExperimentPlan) -> Vec<Cell> {
    let loaded: Vec<Loaded> = plan.datasets.iter().map(load).collect();
    enumerate_cells(plan, &loaded)
}

struct Outcome {
    k: usize,
    train_size: usize,
    accuracy: f64,
    min_margin: f64,
    queries: usize,
    fallbacks: usize,
    violations: usize,
}

fn meta_config(plan: &ExperimentPlan, cell: &Cell, id: &str) -> MetaConfig {
    let k = cell.k.unwrap_or(1);
    MetaConfig {
        k,
        boost: BoostConfig::with_rounds(plan.rounds),
        bag_fraction: plan.bag_fraction,
        bag_count: Some(k),
        lr_cap: cell.k,
        master_seed: derive_seed(cell.seed, &format!("train/{id}"), 0),
        ..MetaConfig::default()
    }
}

fn run_cell(plan: &ExperimentPlan, data: &Loaded, cell: &Cell) -> Result<Outcome> {
    let id = &plan.datasets[cell.dataset].id;
    let cfg = meta_config(plan, cell, id);
    match data {
        Loaded::Failed(msg) => Err(Error::Plan(format!("dataset `{id}` unavailable: {msg}"))),
        Loaded::Table(full) => {
            let spec = SplitSpec { test_fraction: plan.test_fraction, seed: derive_seed(cell.seed, &format!("split/{id}"), 0) };
            let (train_set, test_set) = split(full, &spec)?;
            let fit = train(cell.algorithm, &train_set, &StumpLearner, &cfg)?;
            Ok(Outcome {
                k: fit.ensemble.len(),
                train_size: train_set.n_rows(),
                accuracy: 1.0 - test_error(|x| fit.ensemble.predict(x), &test_set),
                min_margin: fit.min_train_margin(),
                queries: 0,
                fallbacks: 0,
                violations: 0,
            })
        }
        Loaded::Adversarial => {
            let universe = AdversarialUniverse::new(&AdversarialConfig {
                gamma: plan.gamma,
                pool_size: plan.pool_size,
                plus_probability: None,
                pool_seed: derive_seed(cell.seed, "adversarial/pool", 0),
            })?;
            let learner = AdversarialLearner::new(Arc::new(universe));
            let train_set = generate_adversarial_dataset::<f64>(derive_seed(cell.seed, "adversarial/train", 0));
            let test_set = generate_adversarial_dataset::<f64>(derive_seed(cell.seed, "adversarial/test", 0));
            let fit = train(cell.algorithm, &train_set, &learner, &cfg)?;
            Ok(Outcome {
                k: fit.ensemble.len(),
                train_size: train_set.n_rows(),
                accuracy: 1.0 - test_error(|x| fit.ensemble.predict(x), &test_set),
                min_margin: fit.min_train_margin(),
                queries: learner.queries(),
                fallbacks: learner.fallbacks(),
                violations: learner.violations(),
            })
        }
    }
}

fn execute(plan: &ExperimentPlan, loaded: &[Loaded], cell: &Cell, timing: bool) -> ResultRow {
    let start = Instant::now();
    let outcome = run_cell(plan, loaded.get(cell.dataset).expect("cell dataset index"), cell);
    let elapsed = if timing { start.elapsed().as_secs_f64() } else { 0.0 };
    let mut row = ResultRow {
        dataset: plan.datasets[cell.dataset].id.clone(),
        algorithm: cell.algorithm,
        k: cell.k.unwrap_or(1),
        seed: cell.seed,
        train_size: loaded[cell.dataset].train_size(plan.test_fraction).unwrap_or(0),
        test_accuracy: None,
        wall_time_seconds: elapsed,
        min_train_margin: None,
        error: None,
        weak_queries: 0,
        fallbacks: 0,
        contract_violations: 0,
    };
    match outcome {
        Ok(o) => {
            row.k = o.k;
            row.train_size = o.train_size;
            row.test_accuracy = Some(o.accuracy);
            row.min_train_margin = Some(o.min_margin);
            row.weak_queries = o.queries;
            row.fallbacks = o.fallbacks;
            row.contract_violations = o.violations;
        }
        Err(e) => {
            log::error!("{} / {} / k={:?} / seed {}: {e}", row.dataset, row.algorithm, cell.k, row.seed);
            row.error = Some(e.to_string());
        }
    }
    row
}

/// Runs every cell of the plan and returns rows in plan order.
pub fn run_experiment(plan: &ExperimentPlan, opts: &RunOptions) -> Result<Vec<ResultRow>> {
    run_experiment_with(plan, opts, |_| {})
}

/// [`run_experiment`], handing each row to `emit` as soon as every earlier
/// row has been emitted. Emission order is plan order for any worker count.
pub fn run_experiment_with(
    plan: &ExperimentPlan,
    opts: &RunOptions,
    emit: impl FnMut(&ResultRow) + Send,
) -> Result<Vec<ResultRow>> {
    plan.validate()?;
    let loaded: Vec<Loaded> = plan.datasets.iter().map(load).collect();
    let cells = enumerate_cells(plan, &loaded);

    let mut builder = rayon::ThreadPoolBuilder::new();
    if let Some(n) = opts.workers {
        builder = builder.num_threads(n.max(1));
    }
    let pool = builder.build().map_err(|e| Error::Config(e.to_string()))?;

    struct Emitter<E> {
        next: usize,
        pending: BTreeMap<usize, ResultRow>,
        emit: E,
    }
    let emitter = Mutex::new(Emitter { next: 0, pending: BTreeMap::new(), emit });

    let rows: Vec<ResultRow> = pool.install(|| {
        cells
            .par_iter()
            .enumerate()
            .map(|(i, cell)| {
                let row = execute(plan, &loaded, cell, opts.timing);
                let mut e = emitter.lock().expect("emitter lock");
                e.pending.insert(i, row.clone());
                while let Some(r) = {
                    let n = e.next;
                    e.pending.remove(&n)
                } {
                    (e.emit)(&r);
                    e.next += 1;
                }
                row
            })
            .collect()
    });
    Ok(rows)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn tiny_plan() -> ExperimentPlan {
        ExperimentPlan {
            algorithms: vec![Algorithm::AdaBoost, Algorithm::MajorityOfK],
            k_values: vec![3, 5, 7],
            rounds: 5,
            ..ExperimentPlan::new(vec![DatasetSpec::parse("synthetic-diabetes").unwrap()])
        }
    }

    #[test]
    fn cell_arithmetic() {
        assert_eq!(plan_cells(&tiny_plan()).len(), 3 * 5 + 5);
        let only_ada = ExperimentPlan { algorithms: vec![Algorithm::AdaBoost], k_values: vec![], ..tiny_plan() };
        assert_eq!(plan_cells(&only_ada).len(), 5);
        let lr_capped = ExperimentPlan { algorithms: vec![Algorithm::LarsenRitzert], lr_full_max_rows: 0, ..tiny_plan() };
        assert_eq!(plan_cells(&lr_capped).len(), 15);
        let lr_full = ExperimentPlan { algorithms: vec![Algorithm::LarsenRitzert], ..tiny_plan() };
        assert_eq!(plan_cells(&lr_full).len(), 5);
    }

    #[test]
    fn rows_in_order_and_deterministic() {
        let plan = ExperimentPlan { seeds: vec![0, 1], ..tiny_plan() };
        let opts = RunOptions { workers: Some(3), timing: false };
        let mut emitted = Vec::new();
        let rows = run_experiment_with(&plan, &opts, |r| emitted.push(r.clone())).unwrap();
        assert_eq!(rows, emitted);
        assert_eq!(rows.len(), 2 + 3 * 2);
        assert_eq!(rows, run_experiment(&plan, &opts).unwrap());
        for r in &rows {
            let acc = r.test_accuracy.unwrap();
            assert!((0.0..=1.0).contains(&acc));
            assert_eq!(r.train_size, 614);
            assert_eq!(r.wall_time_seconds, 0.0);
        }
        assert_eq!(rows[0].algorithm, Algorithm::AdaBoost);
        assert_eq!(rows[2].k, 3);
    }

    #[test]
    fn failed_cells_become_error_rows() {
        let plan = ExperimentPlan {
            algorithms: vec![Algorithm::AdaBoost],
            seeds: vec![0],
            ..ExperimentPlan::new(vec![DatasetSpec::parse("missing=/nonexistent/file.csv").unwrap()])
        };
        let rows = run_experiment(&plan, &RunOptions::default()).unwrap();
        assert_eq!(rows.len(), 1);
        assert!(rows[0].error.is_some());
        assert!(rows[0].test_accuracy.is_none());
        assert_eq!(rows[0].csv_line(), format!("missing,adaboost,1,0,0,,{},", rows[0].wall_time_seconds));
    }

    #[test]
    fn plan_parsing() {
        let toml_text = r#"
            algorithms = ["adaboost", "maj"]
            k_values = [3]
            seeds = [1, 2]
            [[datasets]]
            id = "d"
            source = "synthetic_diabetes"
            [[datasets]]
            id = "csv"
            source = "csv"
            path = "x.csv"
            label_column = 0
        "#;
        let plan: ExperimentPlan = toml::from_str(toml_text).unwrap();
        assert_eq!(plan.algorithms, vec![Algorithm::AdaBoost, Algorithm::MajorityOfK]);
        assert_eq!(plan.rounds, 300);
        assert_eq!(plan.datasets[1].source, DatasetSource::Csv {
            path: "x.csv".into(),
            label_column: LabelColumn::Index(0),
            positive: "1".into()
        });
        let json = plan.to_json().unwrap();
        let back: ExperimentPlan = serde_json::from_str(&json).unwrap();
        assert_eq!(back, plan);
        assert!(ExperimentPlan { gamma: 0.5, ..plan.clone() }.validate().is_err());
        assert!(ExperimentPlan { seeds: vec![], ..plan }.validate().is_err());
    }

    #[test]
    fn default_sweep_values() {
        let p = ExperimentPlan::new(vec![]);
        assert_eq!(p.k_values, vec![3, 5, 7, 9, 11, 13, 15, 17, 19, 21, 23, 25, 27, 29]);
        assert_eq!(p.seeds.len(), 5);
        assert_eq!(p.bag_fraction, 0.95);
    }
}
