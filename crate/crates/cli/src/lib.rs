//! Batch runner: classify awareness events from Google Trends exports and
//! write a summary report with per-query diagnostics and plot data.

pub mod batch;
pub mod config;
pub mod output;
pub mod pipeline;

pub use batch::{run_batch, BatchSummary};
pub use config::{load_entries, BatchConfig, ConfigEntry};
pub use pipeline::{run_single, Diagnostics, SingleRun};
