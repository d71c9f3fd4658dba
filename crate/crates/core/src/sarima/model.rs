//! Model orders, coefficients, lag-polynomial algebra, and differencing.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub const SEASON: usize = 12;

/// Orders of a SARIMA(p,d,q)(P,D,Q)_12 model.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct SarimaSpec {
    pub p: usize,
    pub d: usize,
    pub q: usize,
    pub seasonal_p: usize,
    pub seasonal_d: usize,
    pub seasonal_q: usize,
    pub period: usize,
}

impl SarimaSpec {
    pub fn new(p: usize, d: usize, q: usize, seasonal_p: usize, seasonal_d: usize, seasonal_q: usize) -> Result<Self> {
        let spec = Self {
            p,
            d,
            q,
            seasonal_p,
            seasonal_d,
            seasonal_q,
            period: SEASON,
        };
        spec.validate()?;
        Ok(spec)
    }

    pub fn arima(p: usize, d: usize, q: usize) -> Result<Self> {
        Self::new(p, d, q, 0, 0, 0)
    }

    pub fn validate(&self) -> Result<()> {
        if self.period != SEASON {
            return Err(Error::InvalidSpec(format!("season length must be 12, got {}", self.period)));
        }
        if self.d + self.seasonal_d > 2 {
            return Err(Error::InvalidSpec("d + D must not exceed 2".into()));
        }
        if self.p > 5 || self.q > 5 || self.seasonal_p > 2 || self.seasonal_q > 2 {
            return Err(Error::InvalidSpec(format!("orders out of range: {self}")));
        }
        Ok(())
    }

    pub fn is_seasonal(&self) -> bool {
        self.seasonal_p + self.seasonal_d + self.seasonal_q > 0
    }

    /// Number of ARMA coefficients (non-seasonal plus seasonal).
    pub fn n_coefficients(&self) -> usize {
        self.p + self.q + self.seasonal_p + self.seasonal_q
    }

    /// Observations consumed by differencing.
    pub fn warm_up(&self) -> usize {
        self.d + self.period * self.seasonal_d
    }

    pub fn ar_lags(&self) -> usize {
        self.p + self.period * self.seasonal_p
    }

    pub fn ma_lags(&self) -> usize {
        self.q + self.period * self.seasonal_q
    }
}

impl fmt::Display for SarimaSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({},{},{})", self.p, self.d, self.q)?;
        if self.is_seasonal() {
            write!(f, "({},{},{})_{}", self.seasonal_p, self.seasonal_d, self.seasonal_q, self.period)?;
        }
        Ok(())
    }
}

/// Natural-scale SARIMA coefficients.
///
/// Sign conventions: AR factors are `1 - Σ φ_i B^i`, MA factors `1 + Σ θ_i B^i`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SarimaParams {
    pub phi: Vec<f64>,
    pub theta: Vec<f64>,
    pub sphi: Vec<f64>,
    pub stheta: Vec<f64>,
    pub sigma2: f64,
    /// Mean of the differenced series (the drift when differenced).
    pub mean_term: f64,
}

impl SarimaParams {
    /// All-zero coefficients with unit variance.
    pub fn white_noise(spec: &SarimaSpec) -> Self {
        Self {
            phi: vec![0.0; spec.p],
            theta: vec![0.0; spec.q],
            sphi: vec![0.0; spec.seasonal_p],
            stheta: vec![0.0; spec.seasonal_q],
            sigma2: 1.0,
            mean_term: 0.0,
        }
    }

    pub(crate) fn check_shape(&self, spec: &SarimaSpec) -> Result<()> {
        if self.phi.len() != spec.p
            || self.theta.len() != spec.q
            || self.sphi.len() != spec.seasonal_p
            || self.stheta.len() != spec.seasonal_q
        {
            return Err(Error::InvalidSpec(format!("coefficient counts do not match {spec}")));
        }
        if !(self.sigma2 > 0.0 && self.sigma2.is_finite()) {
            return Err(Error::InvalidSpec("sigma2 must be positive".into()));
        }
        Ok(())
    }

    /// Packs the ARMA coefficients in `phi, theta, sphi, stheta` order.
    pub fn coefficients(&self) -> Vec<f64> {
        self.phi
            .iter()
            .chain(&self.theta)
            .chain(&self.sphi)
            .chain(&self.stheta)
            .copied()
            .collect()
    }
}

/// Expands the multiplicative seasonal polynomials into plain lag coefficients.
///
/// Returns `(ar, ma)` such that the model reads
/// `x_t - Σ ar[i-1] x_{t-i} = e_t + Σ ma[j-1] e_{t-j}`.
pub fn expand_polynomials(spec: &SarimaSpec, params: &SarimaParams) -> (Vec<f64>, Vec<f64>) {
    let s = spec.period;
    let mut ar = vec![0.0; spec.ar_lags()];
    for (i, &a) in params.phi.iter().enumerate() {
        ar[i] += a;
    }
    for (j, &b) in params.sphi.iter().enumerate() {
        ar[s * (j + 1) - 1] += b;
        for (i, &a) in params.phi.iter().enumerate() {
            ar[s * (j + 1) + i] -= a * b;
        }
    }
    let mut ma = vec![0.0; spec.ma_lags()];
    for (i, &a) in params.theta.iter().enumerate() {
        ma[i] += a;
    }
    for (j, &b) in params.stheta.iter().enumerate() {
        ma[s * (j + 1) - 1] += b;
        for (i, &a) in params.theta.iter().enumerate() {
            ma[s * (j + 1) + i] += a * b;
        }
    }
    (ar, ma)
}

/// Applies `(1-B)^d` then `(1-B^12)^D`.
pub fn difference(series: &[f64], d: usize, seasonal_d: usize) -> Result<Vec<f64>> {
    let warm = d + SEASON * seasonal_d;
    if series.len() <= warm {
        return Err(Error::TooShort {
            needed: warm + 1,
            have: series.len(),
        });
    }
    let mut out = series.to_vec();
    for _ in 0..d {
        out = out.windows(2).map(|w| w[1] - w[0]).collect();
    }
    for _ in 0..seasonal_d {
        out = (SEASON..out.len()).map(|t| out[t] - out[t - SEASON]).collect();
    }
    Ok(out)
}

/// Coefficients `c_k` with `(1-B)^d (1-B^12)^D y_t = y_t - Σ c_k y_{t-k}`.
pub fn differencing_lags(d: usize, seasonal_d: usize) -> Vec<f64> {
    // polynomial in B, constant term first
    let mut poly = vec![1.0];
    let mut mul = |factor: &[(usize, f64)]| {
        let deg = factor.iter().map(|f| f.0).max().unwrap_or(0);
        let mut next = vec![0.0; poly.len() + deg];
        for (i, &a) in poly.iter().enumerate() {
            for &(k, b) in factor {
                next[i + k] += a * b;
            }
        }
        poly = next;
    };
    for _ in 0..d {
        mul(&[(0, 1.0), (1, -1.0)]);
    }
    for _ in 0..seasonal_d {
        mul(&[(0, 1.0), (SEASON, -1.0)]);
    }
    poly[1..].iter().map(|c| -c).collect()
}

/// Inverse of [`difference`], given the first `d + 12 D` original values.
pub fn undifference(diffed: &[f64], initial: &[f64], d: usize, seasonal_d: usize) -> Result<Vec<f64>> {
    let lags = differencing_lags(d, seasonal_d);
    if initial.len() != lags.len() {
        return Err(Error::BadArgs(format!(
            "need {} initial values, got {}",
            lags.len(),
            initial.len()
        )));
    }
    let mut out = initial.to_vec();
    for &w in diffed {
        let t = out.len();
        let carry: f64 = lags.iter().enumerate().map(|(k, c)| c * out[t - 1 - k]).sum();
        out.push(w + carry);
    }
    Ok(out)
}

// --- stationarity-preserving reparameterization ---------------------------

/// Partial autocorrelations to AR coefficients (Durbin–Levinson).
fn pacf_to_ar(pacf: &[f64]) -> Vec<f64> {
    let mut phi: Vec<f64> = Vec::with_capacity(pacf.len());
    for (k, &r) in pacf.iter().enumerate() {
        let mut next = Vec::with_capacity(k + 1);
        for j in 0..k {
            next.push(phi[j] - r * phi[k - 1 - j]);
        }
        next.push(r);
        phi = next;
    }
    phi
}

/// AR coefficients to partial autocorrelations (step-down). `None` when the
/// polynomial `1 - Σ a_i z^i` has a root on or inside the unit circle.
pub(crate) fn ar_to_pacf(ar: &[f64]) -> Option<Vec<f64>> {
    let mut phi = ar.to_vec();
    let mut pacf = vec![0.0; ar.len()];
    for k in (0..ar.len()).rev() {
        let r = phi[k];
        if !r.is_finite() || r.abs() >= 1.0 {
            return None;
        }
        pacf[k] = r;
        let denom = 1.0 - r * r;
        phi = (0..k).map(|j| (phi[j] + r * phi[k - 1 - j]) / denom).collect();
    }
    Some(pacf)
}

/// True when `1 - Σ a_i z^i` has all roots strictly outside the unit circle.
pub fn is_stable(ar: &[f64]) -> bool {
    ar_to_pacf(ar).is_some()
}

fn squash(u: f64) -> f64 {
    u / (1.0 + u * u).sqrt()
}

fn unsquash(r: f64) -> f64 {
    r / (1.0 - r * r).sqrt()
}

fn ar_from_free(u: &[f64]) -> Vec<f64> {
    pacf_to_ar(&u.iter().map(|&v| squash(v)).collect::<Vec<_>>())
}

fn ar_to_free(ar: &[f64]) -> Result<Vec<f64>> {
    let pacf = ar_to_pacf(ar).ok_or(Error::NonStationaryParams)?;
    Ok(pacf.into_iter().map(unsquash).collect())
}

fn ma_from_free(u: &[f64]) -> Vec<f64> {
    ar_from_free(u).into_iter().map(|a| -a).collect()
}

fn ma_to_free(ma: &[f64]) -> Result<Vec<f64>> {
    ar_to_free(&ma.iter().map(|m| -m).collect::<Vec<_>>())
}

/// Maps an unconstrained vector (ordered `phi, theta, sphi, stheta`) to
/// coefficients that are always stationary and invertible.
pub fn coefficients_from_free(spec: &SarimaSpec, u: &[f64]) -> (Vec<f64>, Vec<f64>, Vec<f64>, Vec<f64>) {
    let (a, rest) = u.split_at(spec.p);
    let (b, rest) = rest.split_at(spec.q);
    let (c, e) = rest.split_at(spec.seasonal_p);
    (ar_from_free(a), ma_from_free(b), ar_from_free(c), ma_from_free(&e[..spec.seasonal_q]))
}

/// Inverse of [`coefficients_from_free`].
pub fn coefficients_to_free(params: &SarimaParams) -> Result<Vec<f64>> {
    let mut u = ar_to_free(&params.phi)?;
    u.extend(ma_to_free(&params.theta)?);
    u.extend(ar_to_free(&params.sphi)?);
    u.extend(ma_to_free(&params.stheta)?);
    Ok(u)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn multiplicative_ar_expansion() {
        let spec = SarimaSpec::new(1, 0, 0, 1, 0, 0).unwrap();
        let params = SarimaParams {
            phi: vec![0.5],
            sphi: vec![0.3],
            ..SarimaParams::white_noise(&spec)
        };
        let (ar, ma) = expand_polynomials(&spec, &params);
        assert_eq!(ar.len(), 13);
        assert!(ma.is_empty());
        assert!((ar[0] - 0.5).abs() < 1e-15);
        assert!((ar[11] - 0.3).abs() < 1e-15);
        assert!((ar[12] + 0.15).abs() < 1e-15);
        assert!(ar[1..11].iter().all(|&c| c == 0.0));
    }

    #[test]
    fn trivial_expansions() {
        let spec = SarimaSpec::arima(0, 0, 0).unwrap();
        let (ar, ma) = expand_polynomials(&spec, &SarimaParams::white_noise(&spec));
        assert!(ar.is_empty() && ma.is_empty());

        let spec = SarimaSpec::arima(0, 0, 2).unwrap();
        let params = SarimaParams {
            theta: vec![0.4, 0.1],
            ..SarimaParams::white_noise(&spec)
        };
        assert_eq!(expand_polynomials(&spec, &params).1, vec![0.4, 0.1]);
    }

    #[test]
    fn spec_limits() {
        assert!(SarimaSpec::new(6, 0, 0, 0, 0, 0).is_err());
        assert!(SarimaSpec::new(0, 2, 0, 0, 1, 0).is_err());
        assert!(SarimaSpec::new(0, 0, 0, 3, 0, 0).is_err());
        assert!(SarimaSpec::new(5, 1, 5, 2, 1, 2).is_ok());
    }

    #[test]
    fn differencing_examples() {
        assert_eq!(difference(&[1.0, 3.0, 6.0, 10.0], 1, 0).unwrap(), vec![2.0, 3.0, 4.0]);
        assert_eq!(difference(&[1.0, 2.0], 0, 0).unwrap(), vec![1.0, 2.0]);
        let ramp: Vec<f64> = (1..=24).map(f64::from).collect();
        assert_eq!(difference(&ramp, 0, 1).unwrap(), vec![12.0; 12]);
        assert!(matches!(difference(&ramp[..12], 0, 1), Err(Error::TooShort { .. })));
    }

    #[test]
    fn differencing_lag_polynomial() {
        assert_eq!(differencing_lags(1, 0), vec![1.0]);
        assert_eq!(differencing_lags(2, 0), vec![2.0, -1.0]);
        let l = differencing_lags(1, 1);
        assert_eq!(l.len(), 13);
        assert_eq!((l[0], l[11], l[12]), (1.0, 1.0, -1.0));
    }

    #[test]
    fn stability_check() {
        assert!(is_stable(&[0.5]));
        assert!(!is_stable(&[1.0]));
        assert!(!is_stable(&[1.2, -0.1]));
        assert!(is_stable(&[1.2, -0.5]));
    }

    proptest! {
        #[test]
        fn undifference_reconstructs(y in prop::collection::vec(-1e3f64..1e3, 30..60), d in 0usize..=1, sd in 0usize..=1) {
            let w = difference(&y, d, sd).unwrap();
            let warm = d + SEASON * sd;
            let back = undifference(&w, &y[..warm], d, sd).unwrap();
            for (a, b) in back.iter().zip(&y) {
                prop_assert!((a - b).abs() <= 1e-9 * (1.0 + b.abs()));
            }
        }

        #[test]
        fn free_round_trip(u in prop::collection::vec(-3.0f64..3.0, 0..14), p in 0usize..=5, q in 0usize..=5) {
            let sp = u.len().saturating_sub(p + q).min(2);
            let sq = u.len().saturating_sub(p + q + sp).min(2);
            let spec = SarimaSpec::new(p, 0, q, sp, 0, sq).unwrap();
            let mut free = u.clone();
            free.resize(spec.n_coefficients(), 0.7);
            let (phi, theta, sphi, stheta) = coefficients_from_free(&spec, &free);
            prop_assert!(is_stable(&phi) && is_stable(&sphi));
            prop_assert!(is_stable(&theta.iter().map(|t| -t).collect::<Vec<_>>()));
            prop_assert!(is_stable(&stheta.iter().map(|t| -t).collect::<Vec<_>>()));
            let params = SarimaParams { phi, theta, sphi, stheta, sigma2: 1.0, mean_term: 0.0 };
            let (ar, _) = expand_polynomials(&spec, &params);
            prop_assert!(is_stable(&ar));
            let back = coefficients_to_free(&params).unwrap();
            let (phi2, theta2, sphi2, stheta2) = coefficients_from_free(&spec, &back);
            for (a, b) in params.coefficients().iter().zip(phi2.iter().chain(&theta2).chain(&sphi2).chain(&stheta2)) {
                prop_assert!((a - b).abs() < 1e-10);
            }
        }
    }
}
