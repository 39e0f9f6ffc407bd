//! Command-line front end: flag and config-file resolution, single runs,
//! replicate sets and their summaries.

pub mod config;
pub mod output;
pub mod variants;

pub use config::{ResolvedConfig, RunArgs};
