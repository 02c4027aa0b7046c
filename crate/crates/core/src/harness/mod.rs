//! Experiment orchestration: trials, baselines, evaluation and result files.

mod config;
mod experiment;
mod metrics;
pub mod report;
mod trial;

pub use config::{ExperimentConfig, DEFAULT_LABELS_PER_CLASS};
pub use experiment::{run_experiment, summarize, ExperimentReport, Summary};
pub use metrics::{macro_f1, micro_f1};
pub use trial::{run_trial, sample_initial_labels, EpochRecord, Oracle, PreparedDataset, TrialResult};
