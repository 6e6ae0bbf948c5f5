//! Catalog, metric files, check runner and reports behind the `wstar` binary.

mod catalog;
mod compute;
mod metric_file;
mod run;

pub use catalog::{catalog_metric, describe, CATALOG, PERTURBATION};
pub use compute::{compute_at, parse_point, TENSORS};
pub use metric_file::{load_metric, parse_metric_file, LoadError};
pub use run::{
    run_checks, run_session, unix_time, CheckReport, CheckResult, CheckSelection, OutputFormat, RunConfig, RunError,
    Session, Status, CHECKS,
};
