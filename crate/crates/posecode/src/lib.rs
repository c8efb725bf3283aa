//! File formats, configuration, parallel dataset generation and the
//! command-line interface for `posecode-core`.

pub mod cli;
pub mod config;
pub mod dataset;
mod error;
pub mod formats;

pub use config::PipelineConfig;
pub use error::{Error, Result};
