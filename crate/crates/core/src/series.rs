//! Monthly search-frequency series: Google Trends CSV ingestion, month-length
//! rescaling, and impulse (event indicator) construction.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// A calendar year and month (1-based).
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct YearMonth {
    pub year: i32,
    pub month: u32,
}

impl YearMonth {
    pub fn new(year: i32, month: u32) -> Result<Self> {
        if !(1..=12).contains(&month) {
            return Err(Error::BadMonth(month));
        }
        Ok(Self { year, month })
    }

    /// The month `offset` months after `self`.
    pub fn plus(self, offset: usize) -> Self {
        let idx = self.year as i64 * 12 + (self.month as i64 - 1) + offset as i64;
        Self {
            year: idx.div_euclid(12) as i32,
            month: idx.rem_euclid(12) as u32 + 1,
        }
    }

    pub fn succ(self) -> Self {
        self.plus(1)
    }

    /// Parses `YYYY-MM`.
    pub fn parse(s: &str) -> Option<Self> {
        let (y, m) = s.trim().split_once('-')?;
        if y.len() != 4 || m.len() != 2 {
            return None;
        }
        let year = y.parse().ok()?;
        let month = m.parse().ok()?;
        Self::new(year, month).ok()
    }
}

impl fmt::Display for YearMonth {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:04}-{:02}", self.year, self.month)
    }
}

/// A gap-free monthly series of non-negative search-frequency values.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MonthlySeries {
    pub query_name: String,
    /// Region label from the export header, e.g. `United States`.
    pub region: Option<String>,
    pub start: YearMonth,
    pub values: Vec<f64>,
    pub rescaled: bool,
}

impl MonthlySeries {
    /// Builds a series, checking the value invariants.
    pub fn new(query_name: impl Into<String>, start: YearMonth, values: Vec<f64>) -> Result<Self> {
        if values.is_empty() {
            return Err(Error::EmptySeries);
        }
        if let Some((i, v)) = values
            .iter()
            .enumerate()
            .find(|(_, v)| !v.is_finite() || **v < 0.0)
        {
            return Err(Error::BadValue {
                line: i + 1,
                value: v.to_string(),
            });
        }
        Ok(Self {
            query_name: query_name.into(),
            region: None,
            start,
            values,
            rescaled: false,
        })
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn end(&self) -> YearMonth {
        self.start.plus(self.values.len().saturating_sub(1))
    }

    pub fn month_at(&self, i: usize) -> YearMonth {
        self.start.plus(i)
    }

    /// Calendar month (1..=12) of each observation.
    pub fn months(&self) -> impl Iterator<Item = u32> + '_ {
        (0..self.values.len()).map(|i| self.month_at(i).month)
    }

    /// Same calendar anchoring, new values.
    pub fn with_values(&self, values: Vec<f64>) -> Self {
        Self {
            values,
            ..self.clone()
        }
    }

    /// Writes the series back out in the Google Trends export layout.
    pub fn to_gt_csv(&self) -> String {
        let mut out = String::new();
        match &self.region {
            Some(region) => out.push_str(&format!("Month,{}: ({})\n", self.query_name, region)),
            None => out.push_str(&format!("Month,{}\n", self.query_name)),
        }
        for (i, v) in self.values.iter().enumerate() {
            if v.fract() == 0.0 {
                out.push_str(&format!("{},{}\n", self.month_at(i), *v as i64));
            } else {
                out.push_str(&format!("{},{}\n", self.month_at(i), v));
            }
        }
        out
    }
}

/// Parses a Google Trends monthly CSV export.
///
/// Banner lines before the `Month,` header are skipped. `<1` cells map to 0.
pub fn parse_gt_csv(text: &str) -> Result<MonthlySeries> {
    let mut lines = text.lines().enumerate().map(|(i, l)| (i + 1, l.trim_end_matches('\r')));

    let header = lines
        .by_ref()
        .find(|(_, l)| l.starts_with("Month,"))
        .map(|(_, l)| l)
        .ok_or(Error::MissingHeader)?;
    let label = header["Month,".len()..].trim();
    let (query_name, region) = match label.rsplit_once(": (") {
        Some((q, r)) if r.ends_with(')') => (q.trim().to_string(), Some(r[..r.len() - 1].to_string())),
        _ => (label.to_string(), None),
    };

    let mut start = None;
    let mut expected: Option<YearMonth> = None;
    let mut values = Vec::new();
    for (line_no, line) in lines {
        if line.trim().is_empty() {
            continue;
        }
        let (month, cell) = line.split_once(',').ok_or_else(|| Error::BadValue {
            line: line_no,
            value: line.to_string(),
        })?;
        let ym = YearMonth::parse(month).ok_or_else(|| Error::BadValue {
            line: line_no,
            value: month.to_string(),
        })?;
        if let Some(exp) = expected {
            if ym != exp {
                return Err(Error::GapInMonths {
                    expected: exp.to_string(),
                    found: ym.to_string(),
                });
            }
        } else {
            start = Some(ym);
        }
        expected = Some(ym.succ());

        let cell = cell.trim();
        let value = if cell == "<1" {
            0.0
        } else {
            match cell.parse::<u32>() {
                Ok(v) if v <= 100 => v as f64,
                _ => {
                    return Err(Error::BadValue {
                        line: line_no,
                        value: cell.to_string(),
                    })
                }
            }
        };
        values.push(value);
    }

    let start = start.ok_or(Error::EmptySeries)?;
    let mut series = MonthlySeries::new(query_name, start, values)?;
    series.region = region;
    Ok(series)
}

/// Factor that brings a month's value to a 30-day month.
///
/// February is always 30/28, leap year or not.
pub fn month_length_factor(month: u32) -> f64 {
    match month {
        1 | 3 | 5 | 7 | 8 | 10 | 12 => 30.0 / 31.0,
        2 => 30.0 / 28.0,
        _ => 1.0,
    }
}

/// Rescales every month to an equal length of 30 days.
pub fn rescale_months(series: &MonthlySeries) -> Result<MonthlySeries> {
    if series.rescaled {
        return Err(Error::AlreadyRescaled);
    }
    let values = series
        .values
        .iter()
        .zip(series.months())
        .map(|(v, m)| v * month_length_factor(m))
        .collect();
    Ok(MonthlySeries {
        values,
        rescaled: true,
        ..series.clone()
    })
}

/// 0/1 indicator of event months, aligned to a [`MonthlySeries`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ImpulseSeries {
    pub values: Vec<f64>,
    pub event_month: u32,
    pub aligned_start: YearMonth,
}

impl ImpulseSeries {
    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn event_count(&self) -> usize {
        self.values.iter().filter(|&&v| v == 1.0).count()
    }
}

pub fn build_impulse(series: &MonthlySeries, event_month: u32) -> Result<ImpulseSeries> {
    if series.is_empty() {
        return Err(Error::EmptySeries);
    }
    if !(1..=12).contains(&event_month) {
        return Err(Error::BadMonth(event_month));
    }
    let values = series
        .months()
        .map(|m| if m == event_month { 1.0 } else { 0.0 })
        .collect();
    Ok(ImpulseSeries {
        values,
        event_month,
        aligned_start: series.start,
    })
}
