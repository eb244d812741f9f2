//! Experiment runner for Kloosterman angle distributions over F_q(T).

pub mod cache;
pub mod commands;
pub mod config;
pub mod error;
pub mod format;
pub mod report;
pub mod verify;

pub use commands::{Outcome, RunOptions, Runner};
pub use config::{Experiment, ExperimentConfig, Format};
pub use error::CliError;
