//! Per-method significance verdicts, the three-way classification, and the
//! summary report.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::rankstats::peak_threshold;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Method {
    Intervention,
    RankSum,
    PeakCount,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MethodVerdict {
    pub method: Method,
    pub significant: bool,
    /// z for the impulse coefficient, U for the rank sum, k for peak counts.
    pub statistic: Option<f64>,
    /// p-value, or the peak-count pmf for [`Method::PeakCount`].
    pub value: Option<f64>,
    /// Intervention only: whether the intervention model fit strictly better.
    pub fits_better: Option<bool>,
    pub detail: String,
}

impl MethodVerdict {
    /// A not-significant verdict for a method whose computation failed.
    pub fn failed(method: Method, reason: impl Into<String>) -> Self {
        Self {
            method,
            significant: false,
            statistic: None,
            value: None,
            fits_better: None,
            detail: reason.into(),
        }
    }
}

pub fn intervention_gate(fits_better: bool, w0_pvalue: f64, w0_positive: bool, alpha: f64) -> bool {
    fits_better && w0_pvalue < alpha && w0_positive
}

pub fn rank_sum_gate(pvalue: f64, alpha: f64) -> bool {
    pvalue < alpha
}

pub fn peak_gate(k: usize, n_years: usize) -> bool {
    k >= peak_threshold(n_years)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum Conclusion {
    Effective,
    Unclear,
    Ineffective,
}

impl fmt::Display for Conclusion {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Conclusion::Effective => "Effective",
            Conclusion::Unclear => "Unclear",
            Conclusion::Ineffective => "Ineffective",
        })
    }
}

/// The four report columns backing a classification.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Evidence {
    pub wilcoxon_p: Option<f64>,
    pub peak_count: Option<usize>,
    pub tfn_better: Option<bool>,
    pub w0_pvalue: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EventClassification {
    pub query_name: String,
    pub event_month: u32,
    pub verdicts: Vec<MethodVerdict>,
    pub conclusion: Conclusion,
    pub evidence: Evidence,
}

pub fn conclusion_from_flags(flags: &[bool]) -> Conclusion {
    if !flags.is_empty() && flags.iter().all(|&f| f) {
        Conclusion::Effective
    } else if flags.iter().any(|&f| f) {
        Conclusion::Unclear
    } else {
        Conclusion::Ineffective
    }
}

/// Combines the three method verdicts. A method missing from `verdicts`
/// counts as not significant.
pub fn classify_event(query_name: &str, event_month: u32, verdicts: &[MethodVerdict]) -> EventClassification {
    let find = |m: Method| verdicts.iter().find(|v| v.method == m);
    let flags: Vec<bool> = [Method::Intervention, Method::RankSum, Method::PeakCount]
        .iter()
        .map(|&m| find(m).is_some_and(|v| v.significant))
        .collect();
    let evidence = Evidence {
        wilcoxon_p: find(Method::RankSum).and_then(|v| v.value),
        peak_count: find(Method::PeakCount)
            .and_then(|v| v.statistic)
            .map(|k| k as usize),
        tfn_better: find(Method::Intervention).and_then(|v| v.fits_better),
        w0_pvalue: find(Method::Intervention).and_then(|v| v.value),
    };
    EventClassification {
        query_name: query_name.to_string(),
        event_month,
        verdicts: verdicts.to_vec(),
        conclusion: conclusion_from_flags(&flags),
        evidence,
    }
}

/// Replays recorded evidence columns through the method gates.
///
/// The sign of the impulse coefficient is not part of the evidence columns,
/// so it is supplied separately.
pub fn classify_evidence(evidence: &Evidence, w0_positive: bool, n_years: usize, alpha: f64) -> Conclusion {
    let intervention = match (evidence.tfn_better, evidence.w0_pvalue) {
        (Some(better), Some(p)) => intervention_gate(better, p, w0_positive, alpha),
        _ => false,
    };
    let rank_sum = evidence.wilcoxon_p.is_some_and(|p| rank_sum_gate(p, alpha));
    let peaks = evidence.peak_count.is_some_and(|k| peak_gate(k, n_years));
    conclusion_from_flags(&[intervention, rank_sum, peaks])
}

pub const REPORT_HEADER: &str =
    "Event,Wilcoxon p,Peaks at Event Months,TFN Fits Better,Input Series Coefficient p,Conclusion";

fn format_p(p: Option<f64>) -> String {
    match p {
        Some(p) if p < 0.05 => format!("{p:.4}*"),
        Some(p) => format!("{p:.4}"),
        None => "NA".into(),
    }
}

fn csv_field(s: &str) -> String {
    if s.contains([',', '"', '\n', '\r']) {
        format!("\"{}\"", s.replace('"', "\"\""))
    } else {
        s.to_string()
    }
}

/// Summary table as CSV, ordered Effective, Unclear, Ineffective and then by name.
pub fn render_report(classifications: &[EventClassification]) -> String {
    let mut rows: Vec<&EventClassification> = classifications.iter().collect();
    rows.sort_by(|a, b| {
        a.conclusion
            .cmp(&b.conclusion)
            .then_with(|| a.query_name.to_lowercase().cmp(&b.query_name.to_lowercase()))
            .then_with(|| a.query_name.cmp(&b.query_name))
    });
    let mut out = String::from(REPORT_HEADER);
    out.push('\n');
    for c in rows {
        let e = &c.evidence;
        let line = [
            csv_field(&c.query_name),
            format_p(e.wilcoxon_p),
            e.peak_count.map_or("NA".into(), |k| k.to_string()),
            e.tfn_better.map_or("NA".into(), |b| if b { "Yes".into() } else { "No".into() }),
            format_p(e.w0_pvalue),
            c.conclusion.to_string(),
        ]
        .join(",");
        out.push_str(&line);
        out.push('\n');
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn verdict(method: Method, significant: bool) -> MethodVerdict {
        MethodVerdict {
            method,
            significant,
            statistic: Some(1.0),
            value: Some(if significant { 0.01 } else { 0.5 }),
            fits_better: (method == Method::Intervention).then_some(significant),
            detail: String::new(),
        }
    }

    fn triple(a: bool, b: bool, c: bool) -> Vec<MethodVerdict> {
        vec![
            verdict(Method::Intervention, a),
            verdict(Method::RankSum, b),
            verdict(Method::PeakCount, c),
        ]
    }

    #[test]
    fn truth_table() {
        for mask in 0..8u8 {
            let flags = [mask & 1 != 0, mask & 2 != 0, mask & 4 != 0];
            let c = classify_event("q", 10, &triple(flags[0], flags[1], flags[2])).conclusion;
            let expected = match mask {
                7 => Conclusion::Effective,
                0 => Conclusion::Ineffective,
                _ => Conclusion::Unclear,
            };
            assert_eq!(c, expected, "{flags:?}");
        }
    }

    #[test]
    fn published_style_examples() {
        let breast = Evidence {
            wilcoxon_p: Some(0.0),
            peak_count: Some(14),
            tfn_better: Some(true),
            w0_pvalue: Some(0.0),
        };
        assert_eq!(classify_evidence(&breast, true, 14, 0.05), Conclusion::Effective);
        let thyroid = Evidence {
            wilcoxon_p: Some(0.9551),
            peak_count: Some(0),
            tfn_better: Some(false),
            w0_pvalue: Some(0.5111),
        };
        assert_eq!(classify_evidence(&thyroid, true, 14, 0.05), Conclusion::Ineffective);
        let diabetes = Evidence {
            wilcoxon_p: Some(0.0297),
            peak_count: Some(1),
            tfn_better: Some(false),
            w0_pvalue: Some(0.0813),
        };
        assert_eq!(classify_evidence(&diabetes, true, 14, 0.05), Conclusion::Unclear);
    }

    #[test]
    fn empty_report_is_header_only() {
        assert_eq!(render_report(&[]), format!("{REPORT_HEADER}\n"));
    }

    #[test]
    fn report_formatting_and_order() {
        let mut a = classify_event("Zeta", 10, &triple(true, true, true));
        a.evidence = Evidence {
            wilcoxon_p: Some(0.00001),
            peak_count: Some(14),
            tfn_better: Some(true),
            w0_pvalue: Some(0.0123),
        };
        let b = classify_event("alpha", 5, &triple(false, false, false));
        let c = classify_event("Mid, with comma", 3, &[]);
        let report = render_report(&[b, a, c]);
        let lines: Vec<&str> = report.lines().collect();
        assert_eq!(lines[1], "Zeta,0.0000*,14,Yes,0.0123*,Effective");
        assert_eq!(lines[2], "alpha,0.5000,1,No,0.5000,Ineffective");
        assert_eq!(lines[3], "\"Mid, with comma\",NA,NA,NA,NA,Ineffective");
    }

    #[test]
    fn failed_verdict_is_not_significant() {
        let v = MethodVerdict::failed(Method::PeakCount, "no complete year");
        let c = classify_event("q", 1, &[v]);
        assert_eq!(c.conclusion, Conclusion::Ineffective);
        assert_eq!(c.evidence.peak_count, None);
    }

    proptest! {
        #[test]
        fn order_of_verdicts_is_irrelevant(a: bool, b: bool, c: bool, perm in Just([0usize, 1, 2]).prop_shuffle()) {
            let v = triple(a, b, c);
            let shuffled: Vec<MethodVerdict> = perm.iter().map(|&i| v[i].clone()).collect();
            prop_assert_eq!(
                classify_event("q", 1, &v).conclusion,
                classify_event("q", 1, &shuffled).conclusion
            );
            prop_assert_eq!(classify_event("q", 1, &v).evidence, classify_event("q", 1, &shuffled).evidence);
        }
    }
}
