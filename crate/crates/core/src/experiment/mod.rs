//! Run configuration, the CLI commands and result tables.

mod commands;
mod config;
pub mod paper;
mod report;

pub use commands::{
    cmd_ablate, cmd_cv, cmd_extract, cmd_sweep, cmd_synth, load_corpus, AblationRun, Corpus, CvRun,
    ExtractFailure, ExtractSummary, SweepAxis, SweepFailure, SweepPoint, SweepRun,
};
pub use config::{parse_config, DataSection, ModelSection, OutputSection, RunConfig, TrainSection};
pub use report::{
    emit_report, read_result_csv, report_rows, round4, rows_from_report, ReportRow, ResultRow,
    RESULT_HEADER,
};
