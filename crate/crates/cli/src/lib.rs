//! Experiment runner: instance files, JSON experiment configs, seeded
//! replicas and CSV/JSON/plot reporting.

pub mod config;
pub mod experiment;
pub mod parse;
pub mod plot;

pub use config::{AlgorithmConfig, ExperimentConfig, InstanceSpec, SuccessSpec};
pub use experiment::{run_experiment, run_replica, Report, ResultTable};
pub use parse::{parse_binpacking_file, parse_tsp_file, ParseError};
pub use plot::{emit_plot_data, PlotKind};

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("config error: {0}")]
    Config(String),
    #[error("I/O error: {0}")]
    Io(String),
    #[error(transparent)]
    Parse(#[from] ParseError),
    #[error(transparent)]
    Core(#[from] stochopt::Error),
}
