//! Experiment pipelines over the `anisohit` library: configuration, report rows and
//! CSV output.

pub mod config;
pub mod pipelines;
pub mod report;

use anisohit::Error;

pub use config::ExperimentConfig;
pub use pipelines::{run_pipeline, Pipeline};
pub use report::{emit_csv, Check, ReportRow};

pub const EXIT_PASS: i32 = 0;
pub const EXIT_FAIL: i32 = 1;
pub const EXIT_CONFIG: i32 = 2;
pub const EXIT_ERROR: i32 = 3;

/// Process exit code for a failed run.
pub fn exit_code(err: &Error) -> i32 {
    match err {
        Error::Config(_) => EXIT_CONFIG,
        _ => EXIT_ERROR,
    }
}
