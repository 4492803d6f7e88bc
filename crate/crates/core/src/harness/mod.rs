//! Evaluation, verification and Monte Carlo front ends producing tables.

pub mod checks;
pub mod config;
pub mod eval;
pub mod experiments;
pub mod table;

pub use checks::{
    reports_table, run_check, run_suite, CheckGrid, CheckOptions, CheckReport, Suite,
};
pub use config::ConfigFile;
pub use eval::{run_eval, EvalRequest, KernelKind};
pub use experiments::{run_mc, Experiment, McRequest};
pub use table::{Cell, OutputFormat, Table};
