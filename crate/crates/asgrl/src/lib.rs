//! File formats, configuration, the parallel experiment harness and the
//! command-line front end for `asgrl-core`.

pub mod config;
pub mod harness;
pub mod output;
pub mod summary;
pub mod verify;

pub use config::{ConfigFile, ExperimentConfig, Overrides};
pub use harness::{load_task, run_experiment, run_seeds, SeedRun};
pub use verify::{verify_dir, VerifyReport};
