use std::fs;
use std::path::PathBuf;

use anyhow::{Context, Result};
use rayon::prelude::*;
use trend_intervene_core::series::parse_gt_csv;
use trend_intervene_core::verdict::{render_report, EventClassification};

use crate::config::{file_stem, BatchConfig, ConfigEntry};
use crate::output::{plot_csv, plot_rows, plot_svg};
use crate::pipeline::{run_labeled, Diagnostics, StageError};

#[derive(Debug)]
pub struct BatchSummary {
    pub classifications: Vec<EventClassification>,
    /// Entries that produced no classification, with the reason.
    pub failures: Vec<(String, String)>,
    pub report_path: PathBuf,
}

impl BatchSummary {
    pub fn all_classified(&self) -> bool {
        self.failures.is_empty()
    }
}

enum Outcome {
    Done(Box<Diagnostics>),
    Unreadable { label: String, message: String },
}

fn process(entry: &ConfigEntry, config: &BatchConfig) -> Outcome {
    let parsed = fs::read_to_string(&entry.csv_path)
        .map_err(|e| format!("{}: {e}", entry.csv_path.display()))
        .and_then(|text| parse_gt_csv(&text).map_err(|e| format!("{}: {e}", entry.csv_path.display())));
    match parsed {
        Ok(series) => {
            let run = run_labeled(&entry.label, &series, entry.event_month, config.alpha, config.seed);
            Outcome::Done(Box::new(run.diagnostics))
        }
        Err(message) => Outcome::Unreadable {
            label: entry.label.clone(),
            message,
        },
    }
}

/// Runs every entry and writes `report.csv`, `diag/<label>.json`, and
/// `plots/<label>.csv` (plus `plots/<label>.svg` when requested).
pub fn run_batch(config: &BatchConfig) -> Result<BatchSummary> {
    config.validate()?;
    let diag_dir = config.output_dir.join("diag");
    let plot_dir = config.output_dir.join("plots");
    fs::create_dir_all(&diag_dir).with_context(|| format!("creating {}", diag_dir.display()))?;
    fs::create_dir_all(&plot_dir).with_context(|| format!("creating {}", plot_dir.display()))?;

    let pool = rayon::ThreadPoolBuilder::new().num_threads(config.jobs).build()?;
    let outcomes: Vec<Outcome> = pool.install(|| config.entries.par_iter().map(|e| process(e, config)).collect());

    let mut classifications = Vec::new();
    let mut failures = Vec::new();
    for outcome in outcomes {
        match outcome {
            Outcome::Done(diag) => {
                let stem = file_stem(&diag.label);
                let json = serde_json::to_string_pretty(&diag)?;
                fs::write(diag_dir.join(format!("{stem}.json")), json)?;
                let rows = plot_rows(&diag);
                fs::write(plot_dir.join(format!("{stem}.csv")), plot_csv(&rows))?;
                if config.svg {
                    fs::write(plot_dir.join(format!("{stem}.svg")), plot_svg(&diag.label, &rows))?;
                }
                classifications.push(diag.classification);
            }
            Outcome::Unreadable { label, message } => {
                let record = serde_json::json!({
                    "label": label,
                    "errors": [StageError { stage: "input".into(), message: message.clone() }],
                });
                fs::write(
                    diag_dir.join(format!("{}.json", file_stem(&label))),
                    serde_json::to_string_pretty(&record)?,
                )?;
                failures.push((label, message));
            }
        }
    }
    let report_path = config.output_dir.join("report.csv");
    fs::write(&report_path, render_report(&classifications))?;
    Ok(BatchSummary {
        classifications,
        failures,
        report_path,
    })
}
