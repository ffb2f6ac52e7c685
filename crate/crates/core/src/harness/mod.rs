pub mod config;
pub mod report;
pub mod sample;
pub mod suites;

pub use config::{AlphaGrids, RunConfig, SuiteId, Tolerances};
pub use report::{exit_code, report_emit, summarize, to_json, to_markdown, validate_report_json, Provenance, RatioReport, Verdict};
pub use sample::{sample_density, sample_seed};
pub use suites::{run_suite, run_suites};
