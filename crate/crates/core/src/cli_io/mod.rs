//! Configuration, initial conditions, time-series output and the `run`
//! driver behind the command-line tool.

pub mod config;
pub mod generators;
pub mod run;
pub mod timeseries;

pub use config::ExperimentConfig;
pub use generators::{generate_initial, Params, GENERATORS};
pub use run::{run, RunOutcome};
pub use timeseries::{read_csv, write_csv, TimeSeriesRecord};
