//! Pipeline driver behind the `confboost` binary: config loading, the
//! bin / mine / analyze stages and their on-disk artifacts.

pub mod artifacts;
pub mod cli;
pub mod config;
pub mod error;
pub mod json;
pub mod pipeline;

pub use cli::{run_from_args, Cli};
pub use config::PipelineConfig;
pub use error::CliError;
pub use pipeline::{analyze_stage, bin_stage, mine_stage, report, run_pipeline, OutDir};
