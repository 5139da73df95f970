//! Experiment harness: field suites, convergence sweeps, verification
//! reports, output writers and configuration.

pub mod cache;
pub mod config;
pub mod convergence;
pub mod output;
pub mod suites;
pub mod verify;

pub use config::{parse_config_text, read_config_file};
pub use output::Format;
pub use convergence::{fit_slope, run_convergence, Slope, StudyConfig, StudyOutput, StudyRecord};
pub use suites::SuiteKind;
pub use verify::{dims_table, run_verification, DimRow, Verification};
