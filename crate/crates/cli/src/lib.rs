//! Library side of the `gzavg` command-line tool: run configuration, the
//! on-disk cache, output records and the command implementations.

pub mod cache;
pub mod commands;
pub mod config;
pub mod error;
pub mod output;

pub use cache::{Cache, CacheEntry, CacheKind};
pub use commands::{Context, Outcome};
pub use config::RunConfig;
pub use error::CliError;
pub use output::{ExactValue, OutputFormat, Record};
