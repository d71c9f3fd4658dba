//! Rank-sum comparison of event-month values against the rest, and the
//! annual peak-count test.

use serde::{Deserialize, Serialize};
use statrs::distribution::{ContinuousCDF, Normal};

use crate::error::{Error, Result};
use crate::series::MonthlySeries;
use crate::verdict::{Method, MethodVerdict};

/// Largest combined sample handled by the exact null distribution.
pub const EXACT_MAX_N: usize = 20;

/// Splits values into (event-month values, all other values).
pub fn split_by_event_month(series: &MonthlySeries, event_month: u32) -> Result<(Vec<f64>, Vec<f64>)> {
    if !(1..=12).contains(&event_month) {
        return Err(Error::BadMonth(event_month));
    }
    let (mut ev, mut other) = (Vec::new(), Vec::new());
    for (m, v) in series.months().zip(&series.values) {
        if m == event_month {
            ev.push(*v);
        } else {
            other.push(*v);
        }
    }
    if ev.is_empty() || other.is_empty() {
        return Err(Error::EmptyGroup);
    }
    Ok((ev, other))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum PValueMethod {
    Exact,
    NormalApprox,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WilcoxonResult {
    /// Sum of the x ranks in the pooled sample.
    pub rank_sum_x: f64,
    pub rank_sum_y: f64,
    pub u_x: f64,
    pub u_y: f64,
    pub u_min: f64,
    /// One-sided p-value for x stochastically greater than y.
    pub pvalue: f64,
    pub method: PValueMethod,
    /// The x group has the higher mean rank.
    pub direction_ok: bool,
}

/// Midranks (1-based) of the pooled values; also returns whether any tie occurred.
pub fn midranks(values: &[f64]) -> (Vec<f64>, bool) {
    let mut order: Vec<usize> = (0..values.len()).collect();
    order.sort_by(|&a, &b| values[a].total_cmp(&values[b]));
    let mut ranks = vec![0.0; values.len()];
    let mut tied = false;
    let mut i = 0;
    while i < order.len() {
        let mut j = i;
        while j + 1 < order.len() && values[order[j + 1]] == values[order[i]] {
            j += 1;
        }
        if j > i {
            tied = true;
        }
        let r = (i + j) as f64 / 2.0 + 1.0;
        for &k in &order[i..=j] {
            ranks[k] = r;
        }
        i = j + 1;
    }
    (ranks, tied)
}

/// Number of `n_x`-subsets of ranks 1..=n_x+n_y whose rank sum is at least `s`,
/// and the total number of subsets.
fn exact_upper_count(n_x: usize, n_y: usize, s: usize) -> (f64, f64) {
    let n = n_x + n_y;
    let max_sum = n * (n + 1) / 2;
    // ways[k][t]: subsets of size k with sum t among ranks seen so far
    let mut ways = vec![vec![0.0f64; max_sum + 1]; n_x + 1];
    ways[0][0] = 1.0;
    for r in 1..=n {
        for k in (1..=n_x.min(r)).rev() {
            for t in (r..=max_sum).rev() {
                ways[k][t] += ways[k - 1][t - r];
            }
        }
    }
    let total: f64 = ways[n_x].iter().sum();
    let upper: f64 = ways[n_x][s.min(max_sum + 1)..].iter().sum();
    (upper, total)
}

fn normal_approx_pvalue(pooled: &[f64], nx: usize, u_x: f64) -> Result<f64> {
    let n = pooled.len();
    let (nf, nxf, nyf) = (n as f64, nx as f64, (n - nx) as f64);
    let mut sorted = pooled.to_vec();
    sorted.sort_by(f64::total_cmp);
    let mut tie_term = 0.0;
    let mut i = 0;
    while i < sorted.len() {
        let mut j = i;
        while j + 1 < sorted.len() && sorted[j + 1] == sorted[i] {
            j += 1;
        }
        let t = (j - i + 1) as f64;
        tie_term += t * t * t - t;
        i = j + 1;
    }
    let var = nxf * nyf / 12.0 * ((nf + 1.0) - tie_term / (nf * (nf - 1.0)));
    if !(var > 0.0) {
        return Err(Error::DegenerateTies);
    }
    let z = (u_x - nxf * nyf / 2.0 - 0.5) / var.sqrt();
    Ok(Normal::standard().sf(z))
}

/// One-sided normal-approximation p-value with tie-corrected variance and
/// continuity correction, regardless of sample size.
pub fn wilcoxon_normal_approx(x: &[f64], y: &[f64]) -> Result<f64> {
    if x.is_empty() || y.is_empty() {
        return Err(Error::EmptyGroup);
    }
    let pooled: Vec<f64> = x.iter().chain(y).copied().collect();
    let (ranks, _) = midranks(&pooled);
    let nxf = x.len() as f64;
    let u_x = ranks[..x.len()].iter().sum::<f64>() - nxf * (nxf + 1.0) / 2.0;
    normal_approx_pvalue(&pooled, x.len(), u_x)
}

/// One-sided Wilcoxon rank-sum test of `x` greater than `y`.
///
/// The exact null distribution is used when the pooled sample has at most
/// [`EXACT_MAX_N`] values and no ties; otherwise a normal approximation with
/// tie-corrected variance and a 0.5 continuity correction.
pub fn wilcoxon_rank_sum(x: &[f64], y: &[f64]) -> Result<WilcoxonResult> {
    if x.is_empty() || y.is_empty() {
        return Err(Error::EmptyGroup);
    }
    if x.iter().chain(y).any(|v| !v.is_finite()) {
        return Err(Error::DegenerateInput("non-finite value".into()));
    }
    let (nx, ny) = (x.len(), y.len());
    let pooled: Vec<f64> = x.iter().chain(y).copied().collect();
    let (ranks, tied) = midranks(&pooled);
    let n = nx + ny;
    let rank_sum_x: f64 = ranks[..nx].iter().sum();
    let rank_sum_y: f64 = ranks[nx..].iter().sum();
    let (nxf, nyf) = (nx as f64, ny as f64);
    let u_x = rank_sum_x - nxf * (nxf + 1.0) / 2.0;
    let u_y = nxf * nyf - u_x;

    let (pvalue, method) = if n <= EXACT_MAX_N && !tied {
        let (upper, total) = exact_upper_count(nx, ny, rank_sum_x.round() as usize);
        (upper / total, PValueMethod::Exact)
    } else {
        (normal_approx_pvalue(&pooled, nx, u_x)?, PValueMethod::NormalApprox)
    };
    Ok(WilcoxonResult {
        rank_sum_x,
        rank_sum_y,
        u_x,
        u_y,
        u_min: u_x.min(u_y),
        pvalue: pvalue.clamp(0.0, 1.0),
        method,
        direction_ok: rank_sum_x / nxf > rank_sum_y / nyf,
    })
}

pub fn wilcoxon_verdict(result: &WilcoxonResult, alpha: f64) -> MethodVerdict {
    MethodVerdict {
        method: Method::RankSum,
        significant: result.pvalue < alpha,
        statistic: Some(result.u_x),
        value: Some(result.pvalue),
        fits_better: None,
        detail: format!(
            "U={} rank sums {}/{} p={:.4} ({:?})",
            result.u_x, result.rank_sum_x, result.rank_sum_y, result.pvalue, result.method
        ),
    }
}

/// Per-year maximum month for every complete calendar year.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct YearPeak {
    pub year: i32,
    pub month: u32,
    /// The event month shares the maximum with another month.
    pub tied: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PeakCount {
    pub per_year_peak_month: Vec<YearPeak>,
    /// Years whose maximum falls on the event month, ties included.
    pub k: usize,
    pub n_years: usize,
    pub pmf_at_k: f64,
    /// P(X >= k) under the uniform-month null.
    pub tail_p: f64,
    pub threshold: usize,
}

pub fn binomial_pmf(k: usize, n: usize, p: f64) -> Result<f64> {
    if k > n || !(0.0..=1.0).contains(&p) {
        return Err(Error::BadArgs(format!("binomial_pmf({k}, {n}, {p})")));
    }
    let m = k.min(n - k);
    let mut coef = 1.0f64;
    for i in 0..m {
        coef = coef * (n - i) as f64 / (i + 1) as f64;
    }
    Ok(coef * p.powi(k as i32) * (1.0 - p).powi((n - k) as i32))
}

/// P(X >= k) for X ~ Binomial(n, p).
pub fn binomial_tail(k: usize, n: usize, p: f64) -> Result<f64> {
    if k > n {
        return Ok(0.0);
    }
    (k..=n).map(|j| binomial_pmf(j, n, p)).sum()
}

/// Smallest count at or above the Binomial(n, 1/12) mode whose probability
/// falls below 0.05.
pub fn peak_threshold(n_years: usize) -> usize {
    let p = 1.0 / 12.0;
    let mode = ((n_years + 1) as f64 * p).floor() as usize;
    (mode..=n_years)
        .find(|&k| binomial_pmf(k, n_years, p).is_ok_and(|v| v < 0.05))
        .unwrap_or(n_years + 1)
}

pub fn count_event_peaks(series: &MonthlySeries, event_month: u32) -> Result<PeakCount> {
    if !(1..=12).contains(&event_month) {
        return Err(Error::BadMonth(event_month));
    }
    let first_full = if series.start.month == 1 { 0 } else { 13 - series.start.month as usize };
    let mut peaks = Vec::new();
    let mut i = first_full;
    while i + 12 <= series.len() {
        let year = &series.values[i..i + 12];
        let max = year.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        let event_value = year[event_month as usize - 1];
        let first_max = year.iter().position(|&v| v == max).expect("year has a maximum") as u32 + 1;
        let n_max = year.iter().filter(|&&v| v == max).count();
        let (month, tied) = if event_value == max {
            (event_month, n_max > 1)
        } else {
            (first_max, false)
        };
        peaks.push(YearPeak {
            year: series.month_at(i).year,
            month,
            tied,
        });
        i += 12;
    }
    if peaks.is_empty() {
        return Err(Error::NoCompleteYear);
    }
    let n_years = peaks.len();
    let k = peaks.iter().filter(|p| p.month == event_month).count();
    Ok(PeakCount {
        k,
        n_years,
        pmf_at_k: binomial_pmf(k, n_years, 1.0 / 12.0)?,
        tail_p: binomial_tail(k, n_years, 1.0 / 12.0)?,
        threshold: peak_threshold(n_years),
        per_year_peak_month: peaks,
    })
}

pub fn peak_verdict(count: &PeakCount) -> MethodVerdict {
    MethodVerdict {
        method: Method::PeakCount,
        significant: count.k >= count.threshold,
        statistic: Some(count.k as f64),
        value: Some(count.pmf_at_k),
        fits_better: None,
        detail: format!(
            "{} of {} complete years peak at the event month (threshold {})",
            count.k, count.n_years, count.threshold
        ),
    }
}
