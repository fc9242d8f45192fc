mod args;

use std::fs::{self, File};
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{anyhow, Context};
use clap::{Args, Parser, Subcommand, ValueEnum};

use boostlab::harness::{
    load_boone, load_csv, load_raw_csv, prepare_covertype, resolve_data_path, run_experiment_with, summarize,
    synthetic, truncate_higgs, write_dataset_csv, write_summary_csv, CsvOptions, DatasetSpec,
    ExperimentPlan, LabelColumn, ResultRow, RunOptions, HIGGS_ROWS, RESULTS_HEADER,
};
use boostlab::meta::{train, Algorithm, MetaConfig, ModelFile};
use boostlab::{test_error, BoostConfig, Dataset64, StumpLearner};

// Aliases keep clap from treating these as repeated single values; each is
// parsed from one comma/range string.
type AlgoList = Vec<Algorithm>;
type KList = Vec<usize>;

/// Weak-to-strong boosting toolkit.
#[derive(Debug, Parser)]
#[command(name = "boostlab", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Convert a raw benchmark file into a normalized binary CSV.
    Prep(PrepArgs),
    /// Train one model on a CSV file.
    Train(TrainArgs),
    /// Run a dataset × algorithm × k × seed sweep.
    Sweep(SweepArgs),
    /// Run the adversarial weak-learner benchmark.
    Adversarial(AdversarialArgs),
    /// Print the structure and margins of a model file.
    Inspect(InspectArgs),
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum PrepKind {
    /// covtype.data: keep the two most frequent cover types.
    Covertype,
    /// HIGGS.csv: label in column 0, keep the first 300,000 rows.
    Higgs,
    /// MiniBooNE_PID.txt: counts header, signal rows first.
    Boone,
    /// diabetes.csv with a 0/1 outcome in the last column.
    Diabetes,
    /// Any numeric CSV with `--label-column` and `--positive`.
    Csv,
    /// Write the bundled 768×8 diabetes look-alike.
    SyntheticDiabetes,
}

#[derive(Debug, Args)]
struct PrepArgs {
    #[arg(long, value_enum)]
    kind: PrepKind,
    /// Raw input file (relative paths resolve against $BOOSTLAB_DATA_DIR).
    #[arg(long)]
    input: Option<PathBuf>,
    #[arg(long)]
    out: PathBuf,
    #[arg(long, default_value = "last")]
    label_column: LabelColumn,
    #[arg(long, default_value = "1")]
    positive: String,
    /// Row limit for `higgs`.
    #[arg(long, default_value_t = HIGGS_ROWS)]
    rows: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum AlgoArg {
    Adaboost,
    Maj,
    Lr,
    Bag,
}

impl From<AlgoArg> for Algorithm {
    fn from(a: AlgoArg) -> Self {
        match a {
            AlgoArg::Adaboost => Algorithm::AdaBoost,
            AlgoArg::Maj => Algorithm::MajorityOfK,
            AlgoArg::Lr => Algorithm::LarsenRitzert,
            AlgoArg::Bag => Algorithm::BaggedAdaBoost,
        }
    }
}

#[derive(Debug, Args)]
struct TrainArgs {
    #[arg(long)]
    data: PathBuf,
    #[arg(long, value_enum)]
    algo: AlgoArg,
    #[arg(long, default_value_t = 5)]
    k: usize,
    #[arg(long, default_value_t = 300)]
    rounds: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, default_value_t = 0.95, value_parser = args::parse_fraction)]
    bag_fraction: f64,
    /// Number of bags; defaults to ceil(ln(m / 0.01)).
    #[arg(long)]
    bag_count: Option<usize>,
    /// Maximum number of sub-samples for `lr`.
    #[arg(long)]
    lr_cap: Option<usize>,
    #[arg(long, default_value = "last")]
    label_column: LabelColumn,
    #[arg(long, default_value = "1")]
    positive: String,
    /// Held-out CSV; prints test accuracy.
    #[arg(long)]
    test: Option<PathBuf>,
    #[arg(long)]
    out: Option<PathBuf>,
    /// Write the per-round trace of every member as CSV.
    #[arg(long)]
    trace: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct RunArgs {
    /// Worker threads (default: available parallelism).
    #[arg(long)]
    workers: Option<usize>,
    /// Write 0 in the wall-time column.
    #[arg(long)]
    no_timing: bool,
    #[arg(long, default_value = "results")]
    out_dir: PathBuf,
}

#[derive(Debug, Args)]
struct SweepArgs {
    /// Plan file (TOML or JSON); inline flags below are ignored when given.
    #[arg(long)]
    plan: Option<PathBuf>,
    /// Comma list of `synthetic-diabetes`, `adversarial` or `id=path.csv`.
    #[arg(long, required_unless_present = "plan", value_delimiter = ',')]
    datasets: Vec<String>,
    #[arg(long, default_value = "adaboost,maj,lr,bag", value_parser = args::parse_algorithms)]
    algos: AlgoList,
    #[arg(long, default_value = "3:29:2", value_parser = args::parse_k_values)]
    k: KList,
    /// Number of seeds; runs seeds 0..N.
    #[arg(long, default_value_t = 5)]
    seeds: u64,
    #[arg(long, default_value_t = 300)]
    rounds: usize,
    #[arg(long, default_value_t = 0.1, value_parser = args::parse_gamma)]
    gamma: f64,
    #[arg(long, default_value_t = 100)]
    pool: usize,
    #[arg(long, default_value_t = 0.95, value_parser = args::parse_fraction)]
    bag_fraction: f64,
    #[arg(long, default_value_t = 5000)]
    lr_full_max_rows: usize,
    #[command(flatten)]
    run: RunArgs,
}

#[derive(Debug, Args)]
struct AdversarialArgs {
    #[arg(long, default_value_t = 0.1, value_parser = args::parse_gamma)]
    gamma: f64,
    #[arg(long, default_value_t = 100)]
    pool: usize,
    #[arg(long, default_value = "adaboost,maj,lr,bag", value_parser = args::parse_algorithms)]
    algos: AlgoList,
    #[arg(long, default_value = "3:29:2", value_parser = args::parse_k_values)]
    k: KList,
    #[arg(long, default_value_t = 5)]
    seeds: u64,
    #[arg(long, default_value_t = 300)]
    rounds: usize,
    #[command(flatten)]
    run: RunArgs,
}

#[derive(Debug, Args)]
struct InspectArgs {
    #[arg(long)]
    model: PathBuf,
    /// CSV to compute margins and accuracy on (stump models only).
    #[arg(long)]
    data: Option<PathBuf>,
    #[arg(long, default_value = "last")]
    label_column: LabelColumn,
    #[arg(long, default_value = "1")]
    positive: String,
    #[arg(long, default_value_t = 10)]
    bins: usize,
}

/// Failures split by exit code: 2 for bad input from the user, 1 otherwise.
enum Failure {
    Usage(anyhow::Error),
    Runtime(anyhow::Error),
}

impl From<anyhow::Error> for Failure {
    fn from(e: anyhow::Error) -> Self {
        Failure::Runtime(e)
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Prep(a) => prep(a),
        Command::Train(a) => train_cmd(a),
        Command::Sweep(a) => sweep(a),
        Command::Adversarial(a) => adversarial(a),
        Command::Inspect(a) => inspect(a),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Usage(e)) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
        Err(Failure::Runtime(e)) => {
            eprintln!("error: {e:#}");
            ExitCode::from(1)
        }
    }
}

fn csv_options(label_column: LabelColumn, positive: &str) -> CsvOptions {
    CsvOptions { label_column, positive: positive.to_string(), max_rows: None }
}

fn load(path: &Path, opts: &CsvOptions) -> anyhow::Result<Dataset64> {
    let path = resolve_data_path(path);
    load_csv(&path, opts).with_context(|| format!("loading {}", path.display()))
}

fn prep(a: PrepArgs) -> Result<(), Failure> {
    let input = || {
        a.input
            .as_deref()
            .map(resolve_data_path)
            .ok_or_else(|| Failure::Usage(anyhow!("--input is required for this kind")))
    };
    let data = match a.kind {
        PrepKind::SyntheticDiabetes => synthetic::diabetes_like(a.seed),
        PrepKind::Covertype => {
            let raw = load_raw_csv(input()?, LabelColumn::Last, None).map_err(anyhow::Error::from)?;
            prepare_covertype(&raw).map_err(anyhow::Error::from)?
        }
        PrepKind::Higgs => {
            let opts = CsvOptions { label_column: LabelColumn::Index(0), positive: "1".into(), max_rows: Some(a.rows) };
            truncate_higgs(&load(&input()?, &opts)?, a.rows)
        }
        PrepKind::Boone => load_boone(input()?).map_err(anyhow::Error::from)?,
        PrepKind::Diabetes => load(&input()?, &csv_options(LabelColumn::Last, "1"))?,
        PrepKind::Csv => load(&input()?, &csv_options(a.label_column, &a.positive))?,
    };
    write_dataset_csv(&data, &a.out).with_context(|| format!("writing {}", a.out.display()))?;
    eprintln!("wrote {} rows × {} features to {}", data.n_rows(), data.n_cols(), a.out.display());
    Ok(())
}

fn train_cmd(a: TrainArgs) -> Result<(), Failure> {
    let opts = csv_options(a.label_column, &a.positive);
    let data = load(&a.data, &opts)?;
    let algorithm = Algorithm::from(a.algo);
    let cfg = MetaConfig {
        k: a.k,
        boost: BoostConfig::with_rounds(a.rounds),
        bag_fraction: a.bag_fraction,
        bag_count: a.bag_count,
        lr_cap: a.lr_cap,
        master_seed: a.seed,
        ..MetaConfig::default()
    };
    cfg.validate().map_err(|e| Failure::Usage(e.into()))?;
    let fit = train(algorithm, &data, &StumpLearner, &cfg).context("training")?;

    eprintln!("{algorithm}: {} voter(s) on {} rows", fit.ensemble.len(), data.n_rows());
    for (i, m) in fit.members.iter().enumerate() {
        eprintln!(
            "  member {i}: {} rows, {} rounds, stop {:?}, min margin {:.4}",
            m.rows.len(),
            m.trace.rounds.len(),
            m.trace.stop,
            m.trace.last_min_margin().unwrap_or(f64::NAN)
        );
    }
    let train_acc = 1.0 - test_error(|x| fit.ensemble.predict(x), &data);
    eprintln!("training accuracy {train_acc:.6}");

    if let Some(path) = &a.trace {
        let mut out = BufWriter::new(File::create(path).context("creating trace file")?);
        writeln!(out, "member,round,epsilon,alpha,min_margin").context("writing trace")?;
        for (i, m) in fit.members.iter().enumerate() {
            for r in &m.trace.rounds {
                writeln!(out, "{i},{},{},{},{}", r.round, r.epsilon, r.alpha, r.min_margin).context("writing trace")?;
            }
        }
    }
    if let Some(path) = &a.out {
        let mut model = ModelFile::from_ensemble(algorithm.name(), &fit.ensemble);
        model.n_features = Some(data.n_cols());
        model.master_seed = Some(a.seed);
        model.write(BufWriter::new(File::create(path).context("creating model file")?)).context("writing model")?;
        eprintln!("model written to {}", path.display());
    }
    if let Some(path) = &a.test {
        let test = load(path, &opts)?;
        if test.n_cols() != data.n_cols() {
            return Err(Failure::Usage(anyhow!("test file has {} features, training file {}", test.n_cols(), data.n_cols())));
        }
        println!("test_accuracy {}", 1.0 - test_error(|x| fit.ensemble.predict(x), &test));
    }
    Ok(())
}

/// Runs the plan, streaming rows into `results.csv`, then writes the summary
/// and an echo of the plan.
fn execute_plan(plan: &ExperimentPlan, run: &RunArgs) -> Result<Vec<ResultRow>, Failure> {
    plan.validate().map_err(|e| Failure::Usage(e.into()))?;
    fs::create_dir_all(&run.out_dir).with_context(|| format!("creating {}", run.out_dir.display()))?;
    fs::write(run.out_dir.join("plan.json"), plan.to_json().map_err(anyhow::Error::from)?).context("writing plan echo")?;

    let results_path = run.out_dir.join("results.csv");
    let mut out = BufWriter::new(File::create(&results_path).context("creating results.csv")?);
    writeln!(out, "{RESULTS_HEADER}").context("writing results.csv")?;
    let opts = RunOptions { workers: run.workers, timing: !run.no_timing };
    let mut write_err = None;
    let rows = run_experiment_with(plan, &opts, |r| {
        if let Err(e) = writeln!(out, "{}", r.csv_line()).and_then(|_| out.flush()) {
            write_err.get_or_insert(e);
        }
    })
    .map_err(anyhow::Error::from)?;
    if let Some(e) = write_err {
        return Err(anyhow!(e).context("writing results.csv").into());
    }
    drop(out);

    let summary = summarize(&rows);
    write_summary_csv(&summary, BufWriter::new(File::create(run.out_dir.join("summary.csv")).context("creating summary.csv")?))
        .map_err(anyhow::Error::from)?;

    let failed = rows.iter().filter(|r| r.error.is_some()).count();
    eprintln!("{} rows written to {} ({failed} failed)", rows.len(), results_path.display());
    Ok(rows)
}

fn sweep(a: SweepArgs) -> Result<(), Failure> {
    let plan = match &a.plan {
        Some(path) => ExperimentPlan::from_path(path)
            .map_err(|e| Failure::Usage(anyhow!(e).context(format!("reading plan {}", path.display()))))?,
        None => {
            let datasets = a
                .datasets
                .iter()
                .map(|d| DatasetSpec::parse(d))
                .collect::<boostlab::Result<Vec<_>>>()
                .map_err(|e| Failure::Usage(e.into()))?;
            ExperimentPlan {
                algorithms: a.algos.clone(),
                k_values: a.k.clone(),
                seeds: (0..a.seeds).collect(),
                rounds: a.rounds,
                gamma: a.gamma,
                pool_size: a.pool,
                bag_fraction: a.bag_fraction,
                lr_full_max_rows: a.lr_full_max_rows,
                ..ExperimentPlan::new(datasets)
            }
        }
    };
    let rows = execute_plan(&plan, &a.run)?;
    report_contract(&rows);
    Ok(())
}

fn report_contract(rows: &[ResultRow]) {
    let queries: usize = rows.iter().map(|r| r.weak_queries).sum();
    if queries > 0 {
        let fallbacks: usize = rows.iter().map(|r| r.fallbacks).sum();
        let violations: usize = rows.iter().map(|r| r.contract_violations).sum();
        eprintln!("adversarial weak learner: {queries} queries, {fallbacks} fallbacks, {violations} contract violations");
    }
}

fn adversarial(a: AdversarialArgs) -> Result<(), Failure> {
    let plan = ExperimentPlan {
        algorithms: a.algos,
        k_values: a.k,
        seeds: (0..a.seeds).collect(),
        rounds: a.rounds,
        gamma: a.gamma,
        pool_size: a.pool,
        ..ExperimentPlan::new(vec![DatasetSpec::parse("adversarial").expect("builtin dataset")])
    };
    let rows = execute_plan(&plan, &a.run)?;
    let queries: usize = rows.iter().map(|r| r.weak_queries).sum();
    let violations: usize = rows.iter().map(|r| r.contract_violations).sum();
    eprintln!("contract violations: {violations} of {queries} queries");
    report_contract(&rows);
    Ok(())
}

fn inspect(a: InspectArgs) -> Result<(), Failure> {
    let file = File::open(&a.model).with_context(|| format!("opening {}", a.model.display()))?;
    let model: ModelFile<f64> = ModelFile::read(std::io::BufReader::new(file)).map_err(|e| Failure::Usage(e.into()))?;
    println!("algorithm {}  voters {}", model.algorithm, model.voters.len());
    for (i, v) in model.voters.iter().enumerate() {
        let mass: f64 = v.terms.iter().map(|t| t.coefficient).sum();
        println!("voter {i}: {} terms, coefficient mass {mass:.4}", v.terms.len());
    }

    let Some(path) = &a.data else { return Ok(()) };
    let ensemble = model.stump_ensemble().map_err(|e| Failure::Usage(e.into()))?;
    let data = load(path, &csv_options(a.label_column, &a.positive))?;
    let needed = ensemble.voters().iter().flat_map(|v| v.terms()).map(|(_, s)| s.feature + 1).max().unwrap_or(0);
    if needed > data.n_cols() {
        bail_usage(format!("model uses feature {} but data has {} columns", needed - 1, data.n_cols()))?;
    }
    println!("ensemble accuracy {:.6}", 1.0 - test_error(|x| ensemble.predict(x), &data));
    for (i, v) in ensemble.voters().iter().enumerate() {
        let report = v.margins(&data);
        let hist = report.histogram(a.bins);
        println!(
            "voter {i}: min margin {:.4}, mean margin {:.4}, below 0: {:.4}",
            report.min_margin,
            report.mean(),
            report.fraction_below(0.0)
        );
        let width = 2.0 / a.bins.max(1) as f64;
        let peak = hist.iter().copied().max().unwrap_or(1).max(1);
        for (b, n) in hist.iter().enumerate() {
            let lo = -1.0 + b as f64 * width;
            println!("  [{lo:+.2}, {:+.2}) {n:>7} {}", lo + width, "#".repeat(n * 40 / peak));
        }
    }
    Ok(())
}

fn bail_usage(msg: String) -> Result<(), Failure> {
    Err(Failure::Usage(anyhow!(msg)))
}
