use std::f64::consts::PI;

use crate::error::{Error, Result};

/// Raw periodogram at the Fourier frequencies `k/n`, `k = 1..=n/2`.
///
/// The series is mean-centered first. Returns `(frequency, ordinate)` pairs.
pub fn periodogram(series: &[f64]) -> Result<Vec<(f64, f64)>> {
    let n = series.len();
    if n < 4 {
        return Err(Error::TooShort { needed: 4, have: n });
    }
    let mean = series.iter().sum::<f64>() / n as f64;
    let centered: Vec<f64> = series.iter().map(|v| v - mean).collect();
    let nf = n as f64;
    Ok((1..=n / 2)
        .map(|k| {
            let freq = k as f64 / nf;
            let (mut re, mut im) = (0.0, 0.0);
            for (t, x) in centered.iter().enumerate() {
                // reduce k*t mod n before scaling to keep the angle small
                let angle = 2.0 * PI * ((k * t) % n) as f64 / nf;
                re += x * angle.cos();
                im -= x * angle.sin();
            }
            (freq, (re * re + im * im) / nf)
        })
        .collect())
}
