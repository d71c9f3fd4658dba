use std::fmt::Write as _;

use trend_intervene_core::series::YearMonth;

use crate::pipeline::Diagnostics;

/// One row per month: observed value and both models' one-step predictions.
pub struct PlotRow {
    pub month: YearMonth,
    pub actual: f64,
    pub arima_pred: Option<f64>,
    pub tfn_pred: Option<f64>,
}

fn aligned(preds: &[f64], offset: usize, i: usize) -> Option<f64> {
    i.checked_sub(offset).and_then(|j| preds.get(j)).copied()
}

pub fn plot_rows(diag: &Diagnostics) -> Vec<PlotRow> {
    let start = YearMonth::parse(&diag.start).expect("diagnostics carry a valid start month");
    (0..diag.values.len())
        .map(|i| PlotRow {
            month: start.plus(i),
            actual: diag.values[i],
            arima_pred: diag
                .base_fit
                .as_ref()
                .and_then(|f| aligned(&f.one_step_preds, f.window_start(), i)),
            tfn_pred: diag
                .tfn_fit
                .as_ref()
                .and_then(|f| aligned(&f.one_step_preds, f.noise_spec.warm_up(), i)),
        })
        .collect()
}

pub fn plot_csv(rows: &[PlotRow]) -> String {
    let cell = |v: Option<f64>| v.map_or(String::new(), |v| v.to_string());
    let mut out = String::from("month,actual,arima_pred,tfn_pred\n");
    for r in rows {
        let _ = writeln!(out, "{},{},{},{}", r.month, r.actual, cell(r.arima_pred), cell(r.tfn_pred));
    }
    out
}

/// Observed series and intervention-model predictions as two polylines,
/// with an x tick at every January.
pub fn plot_svg(title: &str, rows: &[PlotRow]) -> String {
    const W: f64 = 800.0;
    const H: f64 = 320.0;
    const PAD: f64 = 40.0;
    let n = rows.len().max(2) as f64;
    let ymax = rows
        .iter()
        .flat_map(|r| [Some(r.actual), r.tfn_pred].into_iter().flatten())
        .fold(1e-9, f64::max);
    let x = |i: usize| PAD + (W - 2.0 * PAD) * i as f64 / (n - 1.0);
    let y = |v: f64| H - PAD - (H - 2.0 * PAD) * (v / ymax).clamp(0.0, 1.0);

    let line = |pick: &dyn Fn(&PlotRow) -> Option<f64>| {
        rows.iter()
            .enumerate()
            .filter_map(|(i, r)| pick(r).map(|v| format!("{:.1},{:.1}", x(i), y(v))))
            .collect::<Vec<_>>()
            .join(" ")
    };
    let escaped = title.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;");

    let mut svg = String::new();
    let _ = writeln!(svg, r#"<svg xmlns="http://www.w3.org/2000/svg" width="{W}" height="{H}" font-family="sans-serif" font-size="10">"#);
    let _ = writeln!(svg, r#"<text x="{PAD}" y="20" font-size="13">{escaped}</text>"#);
    let _ = writeln!(svg, r#"<line x1="{PAD}" y1="{b}" x2="{r}" y2="{b}" stroke="black"/>"#, b = H - PAD, r = W - PAD);
    let _ = writeln!(svg, r#"<line x1="{PAD}" y1="{PAD}" x2="{PAD}" y2="{b}" stroke="black"/>"#, b = H - PAD);
    for (i, r) in rows.iter().enumerate().filter(|(_, r)| r.month.month == 1) {
        let _ = writeln!(
            svg,
            r#"<line x1="{xi:.1}" y1="{b}" x2="{xi:.1}" y2="{t}" stroke="black"/><text x="{xi:.1}" y="{l}" text-anchor="middle">{year}</text>"#,
            xi = x(i),
            b = H - PAD,
            t = H - PAD + 4.0,
            l = H - PAD + 16.0,
            year = r.month.year
        );
    }
    let _ = writeln!(svg, r#"<polyline fill="none" stroke="black" points="{}"/>"#, line(&|r| Some(r.actual)));
    let _ = writeln!(svg, r#"<polyline fill="none" stroke="red" points="{}"/>"#, line(&|r| r.tfn_pred));
    svg.push_str("</svg>\n");
    svg
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rows() -> Vec<PlotRow> {
        let start = YearMonth::new(2004, 11).unwrap();
        (0..4)
            .map(|i| PlotRow {
                month: start.plus(i),
                actual: i as f64,
                arima_pred: (i > 0).then_some(1.5),
                tfn_pred: None,
            })
            .collect()
    }

    #[test]
    fn csv_layout() {
        let csv = plot_csv(&rows());
        let lines: Vec<&str> = csv.lines().collect();
        assert_eq!(lines[0], "month,actual,arima_pred,tfn_pred");
        assert_eq!(lines[1], "2004-11,0,,");
        assert_eq!(lines[2], "2004-12,1,1.5,");
    }

    #[test]
    fn svg_has_two_polylines_and_january_ticks() {
        let svg = plot_svg("a <b>", &rows());
        assert_eq!(svg.matches("<polyline").count(), 2);
        assert!(svg.contains(">2005</text>"));
        assert!(svg.contains("a &lt;b&gt;"));
    }
}
