//! Library side of the `pqsum` command: experiment configs, the growth-rate
//! experiments, CSV output and the verification suites.

pub mod config;
pub mod experiments;
pub mod output;
pub mod verify;

pub use config::{ExperimentConfig, ExperimentKind, Grid};
pub use experiments::{run_experiment, Table};
pub use verify::{run_suite, Check, SuiteReport};
