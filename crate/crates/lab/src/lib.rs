//! Monte Carlo experiments, file formats and the command-line interface on
//! top of `pamlab-core`.

pub mod cli;
pub mod experiments;
pub mod format;
pub mod io;

pub use experiments::{
    endpoint_distribution_test, gap_trials, run_trials, summarize, w_equals_z1_frequency, w_over_n_histogram,
    BatchSummary, EndpointTest, GapRecord, TrialConfig, TrialFailure, TrialRecord, Z1Frequency,
};
