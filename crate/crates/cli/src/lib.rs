//! Config-driven experiment runner over the `tflab` library.

pub mod config;
pub mod error;
pub mod run;

pub use config::{Command, ExperimentConfig};
pub use error::CliError;
pub use run::{run, RunOutput};
