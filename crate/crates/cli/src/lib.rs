//! Command-line driver for the BIOMAP planner: sweep execution,
//! single-run inspection, statistics, and graph export.

pub mod config;
pub mod report;
pub mod sweep;

pub use config::{default_sweep, Algorithm, Budgets, Setting, SweepConfig};
pub use report::{
    anova_by_factor, read_records_json, summarize_by_algorithm, AlgorithmSummary, Factor,
    FactorAnova,
};
pub use sweep::{run_point, run_sweep, ExperimentRecord, TimingRecord};
