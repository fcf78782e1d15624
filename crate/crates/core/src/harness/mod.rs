//! Configuration ingestion, experiment drivers, result emission and the CLI.

pub mod cli;
pub mod config;
pub mod experiments;
pub mod output;

pub use cli::{cli_main, run_cli};
pub use config::{Algorithm, ConfigFile, ExperimentKind, ExperimentSpec, ThetaGrid};
pub use experiments::{run, Report};
pub use output::{write_rows, ResultRow, CSV_HEADER, CSV_VERSION_LINE};
