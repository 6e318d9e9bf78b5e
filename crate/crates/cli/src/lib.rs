//! Configuration, stage graph and cache behind the `coword-map` command.

pub mod cache;
pub mod config;
pub mod error;
pub mod pipeline;
pub mod stages;

pub use config::{Overrides, PipelineConfig};
pub use error::CliError;
pub use pipeline::{with_threads, Pipeline, RunOptions, RunOutcome, Stage, StageStatus};
