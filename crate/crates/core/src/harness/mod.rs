//! Batch evaluation over datasets of `(complex, ground truth)` pairs.

mod dataset;
mod report;
mod run;

use std::path::PathBuf;

pub use dataset::{load_dataset, parse_dataset, Dataset, DatasetEntry, DatasetFormat, InvalidLine};
pub use report::{write_report, ReportFormat, ReportOptions};
pub use run::{run_dataset, run_entry, Engine, Measures, RecordClass, RunConfig, RunRecord, Summary};

#[derive(Debug, thiserror::Error)]
pub enum HarnessError {
    #[error("cannot read {}: {source}", path.display())]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("line {line}: {reason}")]
    InvalidLine { line: usize, reason: String },
    #[error("{0}")]
    Config(String),
    #[error("cannot write report: {0}")]
    Report(#[from] std::io::Error),
    #[error("cannot write report: {0}")]
    Csv(#[from] csv::Error),
    #[error("cannot write report: {0}")]
    Json(#[from] serde_json::Error),
}
