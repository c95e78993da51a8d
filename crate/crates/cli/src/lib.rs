//! Batch interface to `mv-entropy`: TOML system definitions in, result
//! records (text, CSV or JSON lines) out.

pub mod commands;
pub mod config;
pub mod error;
pub mod record;

pub use commands::{cmd_compare, cmd_dynamics, cmd_entropy, cmd_refine, RunOptions};
pub use config::{LoadedConfig, Numeric, System, SystemConfig};
pub use error::{CliError, CliResult};
pub use record::{OutputFormat, OutputValue, ResultRecord};
