//! Library backing the `nls2d` experiment driver: configuration parsing,
//! the subcommand implementations, and deterministic artifact emission.
//! The binary in `main.rs` is a thin argument-parsing shell over this.

pub mod commands;
pub mod config;
pub mod error;

pub use config::{parse as parse_config, to_text as config_to_text, ExperimentConfig};
pub use error::{CliError, EXIT_CONFIG, EXIT_NUMERIC, EXIT_ORACLE};
