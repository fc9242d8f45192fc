//! Dataset ingestion and preparation, seeded train/test splits, the
//! multi-seed experiment runner and result aggregation.

mod csv_io;
mod experiment;
mod prep;
mod split;
mod summary;
pub mod synthetic;

pub use csv_io::{
    binarize, load_csv, load_raw_csv, resolve_data_path, write_dataset_csv, CsvOptions, LabelColumn, RawTable,
    DATA_DIR_ENV,
};
pub use experiment::{
    plan_cells, run_experiment, run_experiment_with, write_results_csv, Cell, DatasetSource, DatasetSpec, ExperimentPlan,
    ResultRow, RunOptions, RESULTS_HEADER,
};
pub use prep::{load_boone, prepare_covertype, truncate_higgs, HIGGS_ROWS};
pub use split::{split, split_indices, SplitSpec};
pub use summary::{summarize, write_summary_csv, SummaryRow, SUMMARY_HEADER};
