//! Command-line front end for `dicke-core`: Bell values, loss thresholds,
//! sweeps, oracle verification and the reference reproduction targets.

pub mod app;
pub mod args;
pub mod config;
pub mod error;
pub mod plot;
pub mod record;
pub mod reproduce;
pub mod sweep;
pub mod verify;

pub use app::run;
pub use args::Cli;
pub use error::{CliError, CliResult};
pub use record::{Format, SweepRecord};
