//! Benchmark harness for the `angrad-core` gradient methods.
//!
//! A JSON [`config::SuiteConfig`] names a problem suite, the methods and the
//! tolerances. [`suite::run_suite`] expands it into runs, executes them on a
//! rayon pool and writes `runs.csv`, `summary.csv` and `profile.csv`.
//! [`profile`] computes performance profiles and [`table`] renders summaries
//! as aligned text tables.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod config;
pub mod error;
pub mod profile;
pub mod records;
pub mod suite;
pub mod table;

pub use config::{Method, MethodSpec, Suite, SuiteConfig};
pub use error::{BenchError, Result};
pub use profile::{perf_profile, Metric, PerfProfile};
pub use records::{read_runs, read_summary, summarize, write_runs, write_summary, RunRecord, SummaryRow};
pub use suite::{run_suite, run_suite_path, SuiteOutcome};
pub use table::{render_table, RenderedTable, TableId};

/// Reads `runs.csv` from a path.
pub fn load_runs(path: &std::path::Path) -> Result<Vec<RunRecord>> {
    read_runs(records::open(path)?)
}

/// Reads `summary.csv` from a path.
pub fn load_summary(path: &std::path::Path) -> Result<Vec<SummaryRow>> {
    read_summary(records::open(path)?)
}

/// Writes a profile CSV to a path.
pub fn save_profile(profile: &PerfProfile, path: &std::path::Path) -> Result<()> {
    profile.write_csv(records::create(path)?)
}
