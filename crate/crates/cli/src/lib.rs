//! Scenario files, built-in presets and CSV output for the spinbath
//! simulator. The `spinbath` binary is a thin wrapper over this crate.

pub mod config;
mod error;
pub mod presets;
pub mod run;

pub use config::{parse_config, Scenario};
pub use error::CliError;
pub use presets::{preset, PRESETS};
