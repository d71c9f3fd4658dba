//! Statistical core for judging whether monthly awareness events raise
//! search interest: Google Trends ingestion, SARIMA and intervention
//! models, seasonality tests, rank-based tests, and the final verdict.

pub mod error;
pub mod intervention;
pub mod numkit;
pub mod rankstats;
pub mod sarima;
pub mod seasonal;
pub mod series;
pub mod verdict;

pub use error::{Error, Result};
