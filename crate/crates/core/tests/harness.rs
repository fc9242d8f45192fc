use std::fs;

use boostlab::harness::synthetic::diabetes_like;
use boostlab::harness::{
    load_csv, run_experiment, run_experiment_with, split, summarize, write_dataset_csv, write_results_csv, CsvOptions,
    DatasetSpec, ExperimentPlan, RunOptions, SplitSpec,
};
use boostlab::meta::Algorithm;

#[test]
fn prepared_csv_roundtrips() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("d.csv");
    let data = diabetes_like(2);
    write_dataset_csv(&data, &path).unwrap();
    let back = load_csv(&path, &CsvOptions::default()).unwrap();
    assert_eq!(back, data);
}

#[test]
fn split_is_seeded_and_disjoint() {
    let data = diabetes_like(0);
    let spec = SplitSpec { test_fraction: 0.2, seed: 7 };
    let (a_train, a_test) = split(&data, &spec).unwrap();
    let (b_train, b_test) = split(&data, &spec).unwrap();
    assert_eq!((a_train.n_rows(), a_test.n_rows()), (614, 154));
    assert_eq!(a_train, b_train);
    assert_eq!(a_test, b_test);
}

fn small_plan(dir: &std::path::Path) -> ExperimentPlan {
    let csv = dir.join("toy.csv");
    write_dataset_csv(&diabetes_like(5).head(200), &csv).unwrap();
    let datasets = vec![
        DatasetSpec::parse(&format!("toy={}", csv.display())).unwrap(),
        DatasetSpec::parse("adversarial").unwrap(),
    ];
    ExperimentPlan { k_values: vec![3, 5], seeds: vec![0, 1], rounds: 30, ..ExperimentPlan::new(datasets) }
}

#[test]
fn results_do_not_depend_on_worker_count() {
    let dir = tempfile::tempdir().unwrap();
    let plan = small_plan(dir.path());
    let csv = |workers| {
        let rows = run_experiment(&plan, &RunOptions { workers: Some(workers), timing: false }).unwrap();
        let mut out = Vec::new();
        write_results_csv(&rows, &mut out).unwrap();
        out
    };
    let one = csv(1);
    assert_eq!(one, csv(3));
    assert_eq!(one, csv(8));
}

#[test]
fn rows_stream_in_plan_order() {
    let dir = tempfile::tempdir().unwrap();
    let plan = small_plan(dir.path());
    let mut streamed = Vec::new();
    let rows = run_experiment_with(&plan, &RunOptions { workers: Some(4), timing: false }, |r| {
        streamed.push(r.clone())
    })
    .unwrap();
    assert_eq!(streamed, rows);
    // toy: adaboost 2 + lr (full list) 2 + maj 4 + bag 4; adversarial likewise
    assert_eq!(rows.len(), 24);
    assert!(rows.iter().all(|r| r.error.is_none()));
    assert!(rows.iter().filter(|r| r.dataset == "adversarial").all(|r| r.weak_queries > 0));
    let summary = summarize(&rows);
    assert_eq!(summary.len(), 12);
    assert!(summary.iter().all(|s| s.runs == 2));
}

#[test]
fn plan_file_roundtrips_through_json_echo() {
    let dir = tempfile::tempdir().unwrap();
    let toml_path = dir.path().join("plan.toml");
    fs::write(
        &toml_path,
        r#"
algorithms = ["maj", "lr"]
k_values = [3]
seeds = [4]

[[datasets]]
id = "syn"
source = "synthetic_diabetes"
seed = 3
"#,
    )
    .unwrap();
    let plan = ExperimentPlan::from_path(&toml_path).unwrap();
    assert_eq!(plan.algorithms, vec![Algorithm::MajorityOfK, Algorithm::LarsenRitzert]);
    assert_eq!(plan.rounds, 300);
    let json_path = dir.path().join("plan.json");
    fs::write(&json_path, plan.to_json().unwrap()).unwrap();
    assert_eq!(ExperimentPlan::from_path(&json_path).unwrap(), plan);
}

#[test]
fn unknown_plan_keys_are_rejected() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("plan.toml");
    fs::write(&path, "roundz = 3\n[[datasets]]\nid = \"a\"\nsource = \"adversarial\"\n").unwrap();
    assert!(ExperimentPlan::from_path(&path).is_err());
}
