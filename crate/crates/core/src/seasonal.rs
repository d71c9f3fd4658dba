//! Three seasonality tests and their majority vote.

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};
use statrs::distribution::{ContinuousCDF, FisherSnedecor};

use crate::error::{Error, Result};
use crate::numkit::{ols_fit, periodogram};
use crate::series::MonthlySeries;

pub const MIN_LENGTH: usize = 36;
const LEVEL: f64 = 0.05;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SeasonalityVote {
    pub periodogram_test: bool,
    pub acf_test: bool,
    pub lm_test: bool,
    pub seasonal: bool,
    /// Errors from tests that could not be computed (counted as "no").
    pub errors: Vec<String>,
}

impl SeasonalityVote {
    pub fn from_flags(periodogram_test: bool, acf_test: bool, lm_test: bool) -> Self {
        let yes = [periodogram_test, acf_test, lm_test].iter().filter(|&&f| f).count();
        Self {
            periodogram_test,
            acf_test,
            lm_test,
            seasonal: yes >= 2,
            errors: Vec::new(),
        }
    }
}

fn check_length(values: &[f64]) -> Result<()> {
    if values.len() < MIN_LENGTH {
        return Err(Error::TooShort {
            needed: MIN_LENGTH,
            have: values.len(),
        });
    }
    Ok(())
}

fn first_difference(values: &[f64]) -> Vec<f64> {
    values.windows(2).map(|w| w[1] - w[0]).collect()
}

/// Fisher's g-test on the periodogram of the first differences, accepted
/// only when the dominant frequency is a seasonal harmonic.
pub fn test_periodogram_values(values: &[f64]) -> Result<bool> {
    check_length(values)?;
    let diff = first_difference(values);
    let n = diff.len() as f64;
    let pg = periodogram(&diff)?;
    let total: f64 = pg.iter().map(|(_, p)| p).sum();
    if !(total > 0.0) {
        return Ok(false);
    }
    let (freq, max) = pg
        .iter()
        .copied()
        .max_by(|a, b| a.1.total_cmp(&b.1))
        .expect("periodogram is non-empty");
    let g = max / total;
    let m = pg.len() as f64;
    let pvalue = (m * (1.0 - g).powf(m - 1.0)).min(1.0);
    let half_bin = 0.5 / n;
    let seasonal_freq = (1..=6).any(|k| (freq - k as f64 / 12.0).abs() <= half_bin);
    Ok(pvalue < LEVEL && seasonal_freq)
}

/// Lag-12 sample autocorrelation of the first differences against the
/// white-noise band.
pub fn test_acf_values(values: &[f64]) -> Result<bool> {
    check_length(values)?;
    let diff = first_difference(values);
    let n = diff.len();
    let mean = diff.iter().sum::<f64>() / n as f64;
    let c0: f64 = diff.iter().map(|v| (v - mean).powi(2)).sum();
    if !(c0 > 0.0) {
        return Err(Error::DegenerateVariance);
    }
    let c12: f64 = (12..n).map(|t| (diff[t] - mean) * (diff[t - 12] - mean)).sum();
    Ok((c12 / c0).abs() > 1.96 / (n as f64).sqrt())
}

/// F-test of 11 month dummies on top of an intercept and a linear trend.
pub fn test_lm_values(values: &[f64], start_month: u32) -> Result<bool> {
    check_length(values)?;
    let n = values.len();
    let month = |t: usize| ((start_month as usize - 1 + t) % 12) + 1;
    let reduced = DMatrix::from_fn(n, 2, |t, j| if j == 0 { 1.0 } else { t as f64 });
    let full = DMatrix::from_fn(n, 13, |t, j| match j {
        0 => 1.0,
        1 => t as f64,
        // January is the baseline
        _ => f64::from(month(t) == j),
    });
    let r = ols_fit(&reduced, values)?;
    let f = ols_fit(&full, values)?;
    let mean = values.iter().sum::<f64>() / n as f64;
    let sst: f64 = values.iter().map(|v| (v - mean).powi(2)).sum();
    let gain = r.sse - f.sse;
    if gain <= 1e-12 * sst.max(f64::MIN_POSITIVE) {
        return Ok(false);
    }
    if f.sse <= 0.0 {
        return Ok(true);
    }
    let df = f.degrees_of_freedom as f64;
    let stat = (gain / 11.0) / (f.sse / df);
    let dist = FisherSnedecor::new(11.0, df).map_err(|e| Error::BadArgs(e.to_string()))?;
    Ok(dist.sf(stat) < LEVEL)
}

pub fn test_periodogram(series: &MonthlySeries) -> Result<bool> {
    test_periodogram_values(&series.values)
}

pub fn test_acf(series: &MonthlySeries) -> Result<bool> {
    test_acf_values(&series.values)
}

pub fn test_lm(series: &MonthlySeries) -> Result<bool> {
    test_lm_values(&series.values, series.start.month)
}

/// Majority vote of the three tests; a test that errors votes "no".
pub fn detect_seasonality(series: &MonthlySeries) -> Result<SeasonalityVote> {
    check_length(&series.values)?;
    let mut errors = Vec::new();
    let mut vote = |name: &str, r: Result<bool>| match r {
        Ok(v) => v,
        Err(e) => {
            errors.push(format!("{name}: {e}"));
            false
        }
    };
    let p = vote("periodogram", test_periodogram(series));
    let a = vote("acf", test_acf(series));
    let l = vote("lm", test_lm(series));
    Ok(SeasonalityVote {
        errors,
        ..SeasonalityVote::from_flags(p, a, l)
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::series::YearMonth;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;
    use rand_distr::{Distribution, Normal};

    fn noise(n: usize, sd: f64, seed: u64) -> Vec<f64> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let d = Normal::new(0.0, sd).unwrap();
        (0..n).map(|_| d.sample(&mut rng)).collect()
    }

    fn series(values: Vec<f64>) -> MonthlySeries {
        MonthlySeries::new("q", YearMonth::new(2004, 1).unwrap(), values).unwrap()
    }

    fn sinusoid(amplitude: f64, sd: f64, seed: u64) -> MonthlySeries {
        let e = noise(168, sd, seed);
        series(
            (0..168)
                .map(|t| 50.0 + amplitude * (2.0 * std::f64::consts::PI * t as f64 / 12.0).cos() + e[t])
                .collect(),
        )
    }

    #[test]
    fn majority_rule() {
        assert!(SeasonalityVote::from_flags(true, true, false).seasonal);
        assert!(!SeasonalityVote::from_flags(false, false, true).seasonal);
    }

    #[test]
    fn sinusoid_detected() {
        let s = sinusoid(1.0, 0.1, 1);
        assert!(test_periodogram(&s).unwrap());
        assert!(test_acf(&s).unwrap());
    }

    #[test]
    fn october_bump_detected_by_lm() {
        let e = noise(168, 1.0, 2);
        let s = series((0..168).map(|t| 20.0 + if t % 12 == 9 { 10.0 } else { 0.0 } + e[t]).collect());
        assert!(test_lm(&s).unwrap());
    }

    #[test]
    fn trend_and_ramp_are_not_seasonal() {
        let ramp = series((0..168).map(|t| 3.0 + 0.5 * t as f64).collect());
        assert!(!test_lm(&ramp).unwrap());
        let e = noise(168, 1.0, 3);
        let trend = series((0..168).map(|t| 10.0 + 0.3 * t as f64 + e[t]).collect());
        assert!(!test_periodogram(&trend).unwrap());
    }

    #[test]
    fn constant_series() {
        let s = series(vec![4.0; 48]);
        assert_eq!(test_acf(&s), Err(Error::DegenerateVariance));
        let vote = detect_seasonality(&s).unwrap();
        assert!(!vote.seasonal);
        assert!(!vote.errors.is_empty());
    }

    #[test]
    fn too_short() {
        let s = series(vec![1.0; 30]);
        assert!(matches!(detect_seasonality(&s), Err(Error::TooShort { .. })));
    }

    #[test]
    fn size_under_iid_noise() {
        let (mut p, mut a, mut l) = (0, 0, 0);
        for seed in 0..100 {
            let s = series(noise(168, 1.0, 1000 + seed).iter().map(|v| v + 10.0).collect());
            p += usize::from(test_periodogram(&s).unwrap());
            a += usize::from(test_acf(&s).unwrap());
            l += usize::from(test_lm(&s).unwrap());
        }
        assert!(p <= 15 && a <= 15 && l <= 15, "{p} {a} {l}");
    }

    #[test]
    fn strong_sinusoid_passes_all_tests() {
        for seed in 0..20 {
            let vote = detect_seasonality(&sinusoid(5.0, 1.0, 500 + seed)).unwrap();
            assert!(vote.periodogram_test && vote.acf_test && vote.lm_test, "seed {seed}: {vote:?}");
        }
    }

    #[test]
    fn affine_invariance() {
        for seed in 0..10 {
            let s = sinusoid(0.4, 1.0, 700 + seed);
            let moved = s.with_values(s.values.iter().map(|v| 7.5 * v + 3.0).collect());
            let (a, b) = (detect_seasonality(&s).unwrap(), detect_seasonality(&moved).unwrap());
            assert_eq!(a, b);
        }
    }
}
