//! The per-query pipeline: seasonality vote, order search, intervention
//! fit, rank-sum test, and peak count, each isolated so one failing stage
//! only downgrades its own verdict.

use serde::{Deserialize, Serialize};
use trend_intervene_core::intervention::{intervention_verdict, select_tfn, InterventionFit};
use trend_intervene_core::rankstats::{
    count_event_peaks, peak_verdict, split_by_event_month, wilcoxon_rank_sum, wilcoxon_verdict, PeakCount,
    WilcoxonResult,
};
use trend_intervene_core::sarima::{search_orders, SarimaFit};
use trend_intervene_core::seasonal::{detect_seasonality, SeasonalityVote};
use trend_intervene_core::series::{build_impulse, rescale_months, MonthlySeries};
use trend_intervene_core::verdict::{classify_event, EventClassification, Method, MethodVerdict};
use trend_intervene_core::Error;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StageError {
    pub stage: String,
    pub message: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Diagnostics {
    pub label: String,
    pub query_name: String,
    pub event_month: u32,
    pub alpha: f64,
    pub seed: u64,
    pub start: String,
    pub values: Vec<f64>,
    pub seasonality: Option<SeasonalityVote>,
    pub base_fit: Option<SarimaFit>,
    pub tfn_fit: Option<InterventionFit>,
    pub wilcoxon: Option<WilcoxonResult>,
    pub peaks: Option<PeakCount>,
    pub classification: EventClassification,
    pub errors: Vec<StageError>,
}

pub struct SingleRun {
    pub classification: EventClassification,
    pub diagnostics: Diagnostics,
}

struct Errors(Vec<StageError>);

impl Errors {
    fn take<T>(&mut self, stage: &str, r: Result<T, Error>) -> Option<T> {
        match r {
            Ok(v) => Some(v),
            Err(e) => {
                self.0.push(StageError {
                    stage: stage.into(),
                    message: e.to_string(),
                });
                None
            }
        }
    }

    fn last_for(&self, stage: &str) -> String {
        self.0
            .iter()
            .rev()
            .find(|e| e.stage == stage)
            .map_or_else(|| format!("{stage} skipped"), |e| format!("{}: {}", e.stage, e.message))
    }
}

/// Runs every method on one series. The series is rescaled to equal month
/// lengths first unless that already happened.
pub fn run_single(series: &MonthlySeries, event_month: u32, alpha: f64) -> SingleRun {
    run_labeled(&series.query_name, series, event_month, alpha, 0)
}

/// A constant series carries no information for any method.
fn degenerate(label: &str, series: &MonthlySeries, event_month: u32, alpha: f64, seed: u64) -> SingleRun {
    let message = Error::DegenerateInput("series is constant".into()).to_string();
    let stages = [
        ("intervention", Method::Intervention),
        ("rank sum", Method::RankSum),
        ("peak count", Method::PeakCount),
    ];
    let verdicts: Vec<MethodVerdict> = stages
        .iter()
        .map(|(stage, m)| MethodVerdict::failed(*m, format!("{stage}: {message}")))
        .collect();
    let classification = classify_event(label, event_month, &verdicts);
    let diagnostics = Diagnostics {
        label: label.to_string(),
        query_name: series.query_name.clone(),
        event_month,
        alpha,
        seed,
        start: series.start.to_string(),
        values: series.values.clone(),
        seasonality: None,
        base_fit: None,
        tfn_fit: None,
        wilcoxon: None,
        peaks: None,
        classification: classification.clone(),
        errors: stages
            .iter()
            .map(|(stage, _)| StageError {
                stage: stage.to_string(),
                message: message.clone(),
            })
            .collect(),
    };
    SingleRun {
        classification,
        diagnostics,
    }
}

pub fn run_labeled(label: &str, series: &MonthlySeries, event_month: u32, alpha: f64, seed: u64) -> SingleRun {
    let mut errors = Errors(Vec::new());
    if series.values.iter().all(|&v| v == series.values[0]) {
        return degenerate(label, series, event_month, alpha, seed);
    }
    let series = if series.rescaled {
        series.clone()
    } else {
        rescale_months(series).expect("series is not yet rescaled")
    };

    let seasonality = errors.take("seasonality", detect_seasonality(&series));
    if let Some(vote) = &seasonality {
        for e in &vote.errors {
            errors.0.push(StageError {
                stage: "seasonality".into(),
                message: e.clone(),
            });
        }
    }
    let seasonal = seasonality.as_ref().is_some_and(|v| v.seasonal);

    let base_fit = errors.take("order search", search_orders(&series, seasonal));
    let impulse = errors.take("impulse", build_impulse(&series, event_month));
    let tfn_fit = match (&base_fit, &impulse) {
        (Some(base), Some(imp)) => errors.take("intervention", select_tfn(&series, imp, base, seasonal)),
        _ => None,
    };
    let intervention = match (&base_fit, &tfn_fit) {
        (Some(base), Some(tfn)) => {
            let mut v = intervention_verdict(base, tfn, alpha);
            if let Some(note) = &tfn.note {
                v.detail.push_str("; ");
                v.detail.push_str(note);
            }
            v
        }
        _ => MethodVerdict::failed(Method::Intervention, errors.last_for(if base_fit.is_none() { "order search" } else { "intervention" })),
    };

    let wilcoxon = errors.take(
        "rank sum",
        split_by_event_month(&series, event_month).and_then(|(x, y)| wilcoxon_rank_sum(&x, &y)),
    );
    let rank_sum = match &wilcoxon {
        Some(w) => wilcoxon_verdict(w, alpha),
        None => MethodVerdict::failed(Method::RankSum, errors.last_for("rank sum")),
    };

    let peaks = errors.take("peak count", count_event_peaks(&series, event_month));
    let peak = match &peaks {
        Some(p) => peak_verdict(p),
        None => MethodVerdict::failed(Method::PeakCount, errors.last_for("peak count")),
    };

    let classification = classify_event(label, event_month, &[intervention, rank_sum, peak]);
    let diagnostics = Diagnostics {
        label: label.to_string(),
        query_name: series.query_name.clone(),
        event_month,
        alpha,
        seed,
        start: series.start.to_string(),
        values: series.values.clone(),
        seasonality,
        base_fit,
        tfn_fit,
        wilcoxon,
        peaks,
        classification: classification.clone(),
        errors: errors.0,
    };
    SingleRun {
        classification,
        diagnostics,
    }
}
