//! Batch harness for `oe-core`: suite documents, the check catalog and the
//! runner behind the `oewb` binary.

pub mod catalog;
pub mod config;
pub mod run;

pub use catalog::{catalog, catalog_text, Entry};
pub use config::{Check, CheckSpec, ConfigError, SuiteConfig, CONFIG_SCHEMA_VERSION};
pub use run::{execute, exit_code, run_suite, Format, ReportDocument, RunOptions, SuiteError, Summary};
