//! Command-line harness around `fockforge`: configuration, the verify-all
//! suite, parameter sweeps and report rendering.

pub mod app;
pub mod config;
pub mod output;
pub mod suite;
pub mod sweep;

pub use app::{run_from, Cli};
pub use config::{MarginSetting, OutputFormat, RunConfig};
