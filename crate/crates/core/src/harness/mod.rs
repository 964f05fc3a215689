//! Batch experiments: sweep a parameter, run every scheme over a range of
//! seeds, aggregate and write CSV.
//!
//! Each (sweep value, seed) pair generates one topology and channel model
//! that all schemes share, so scheme differences are not masked by
//! deployment noise.

mod config;
mod output;
mod run;

pub use config::{ExperimentConfig, ModelParams, NetworkParams, Scenario, Scheme};
pub use output::emit_outputs;
pub use run::{
    mean_sd, run_cells, run_experiment, summarize, CellResult, ExperimentResult, SummaryRow,
};
