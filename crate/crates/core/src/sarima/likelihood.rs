//! Exact Gaussian likelihood of an ARMA process via the innovations algorithm
//! applied to the transformed process of Ansley (1979).
//!
//! Everything here works with unit innovation variance; the one-step
//! prediction error of observation `t` has variance `sigma2 * v[t]`.

use std::f64::consts::PI;

use nalgebra::{DMatrix, DVector};

use super::model::{expand_polynomials, is_stable, SarimaParams, SarimaSpec};
use crate::error::{Error, Result};

/// Autocovariances `γ(0..=max_lag)` of a unit-variance ARMA process.
pub fn arma_autocovariance(ar: &[f64], ma: &[f64], max_lag: usize) -> Result<Vec<f64>> {
    let p = ar.len();
    let q = ma.len();
    let theta = |j: usize| if j == 0 { 1.0 } else { ma[j - 1] };

    let mut psi = vec![0.0; q + 1];
    for j in 0..=q {
        let mut v = theta(j);
        for i in 1..=j.min(p) {
            v += ar[i - 1] * psi[j - i];
        }
        psi[j] = v;
    }
    let rhs = |k: usize| -> f64 { (k..=q).map(|j| theta(j) * psi[j - k]).sum() };

    let mut a = DMatrix::<f64>::zeros(p + 1, p + 1);
    let mut b = DVector::<f64>::zeros(p + 1);
    for k in 0..=p {
        a[(k, k)] += 1.0;
        for i in 1..=p {
            a[(k, k.abs_diff(i))] -= ar[i - 1];
        }
        b[k] = rhs(k);
    }
    let head = a
        .lu()
        .solve(&b)
        .ok_or_else(|| Error::NumericalBreakdown("autocovariance system is singular".into()))?;

    let mut gamma = vec![0.0; max_lag.max(p) + 1];
    gamma[..=p].copy_from_slice(head.as_slice());
    for k in p + 1..gamma.len() {
        gamma[k] = (1..=p).map(|i| ar[i - 1] * gamma[k - i]).sum::<f64>() + rhs(k);
    }
    gamma.truncate(max_lag + 1);
    if gamma[0] <= 0.0 || gamma.iter().any(|g| !g.is_finite()) {
        return Err(Error::NumericalBreakdown("non-positive process variance".into()));
    }
    Ok(gamma)
}

/// Innovations predictor for a fixed ARMA model and sample size.
///
/// The predictor is linear in the data, so one instance can whiten the
/// response and every regressor column.
pub(crate) struct Innovations {
    ar: Vec<f64>,
    m: usize,
    q: usize,
    /// `theta[n][j-1]` is θ_{n,j}; row `n` predicts observation `n` (0-based).
    theta: Vec<Vec<f64>>,
    /// Relative prediction variance of each observation.
    pub(crate) v: Vec<f64>,
}

impl Innovations {
    pub(crate) fn new(ar: &[f64], ma: &[f64], n: usize) -> Result<Self> {
        let p = ar.len();
        let q = ma.len();
        let m = p.max(q);
        let gamma = arma_autocovariance(ar, ma, m)?;
        let theta0 = |j: usize| if j == 0 { 1.0 } else { ma[j - 1] };

        // Covariance of the transformed process (1-based indices).
        let kappa = |i: usize, j: usize| -> f64 {
            let (lo, hi) = if i <= j { (i, j) } else { (j, i) };
            let h = hi - lo;
            if hi <= m {
                gamma[h]
            } else if lo <= m {
                if hi > 2 * m || h > q {
                    return 0.0;
                }
                gamma[h] - (1..=p).map(|r| ar[r - 1] * gamma[r.abs_diff(h)]).sum::<f64>()
            } else if h <= q {
                (0..=q - h).map(|r| theta0(r) * theta0(r + h)).sum()
            } else {
                0.0
            }
        };

        let mut theta: Vec<Vec<f64>> = Vec::with_capacity(n);
        let mut v = Vec::with_capacity(n);
        if n == 0 {
            return Ok(Self { ar: ar.to_vec(), m, q, theta, v });
        }
        theta.push(Vec::new());
        v.push(kappa(1, 1));
        for nn in 1..n {
            // θ_{nn, j} for j = 1..=width
            let width = if nn < m { nn } else { q };
            let mut row = vec![0.0; width];
            for k in nn - width..nn {
                let mut s = kappa(nn + 1, k + 1);
                let prev = &theta[k];
                for jj in (nn - width)..k {
                    let a = k - jj;
                    if a == 0 || a > prev.len() {
                        continue;
                    }
                    s -= prev[a - 1] * row[nn - jj - 1] * v[jj];
                }
                row[nn - k - 1] = s / v[k];
            }
            let var = kappa(nn + 1, nn + 1)
                - (nn - width..nn)
                    .map(|jj| row[nn - jj - 1].powi(2) * v[jj])
                    .sum::<f64>();
            if !(var > 0.0) || !var.is_finite() {
                return Err(Error::NumericalBreakdown(format!(
                    "non-positive prediction variance at t={nn}"
                )));
            }
            theta.push(row);
            v.push(var);
        }
        Ok(Self { ar: ar.to_vec(), m, q, theta, v })
    }

    /// One-step prediction errors `x_t - x̂_t`.
    pub(crate) fn errors(&self, x: &[f64]) -> Vec<f64> {
        debug_assert_eq!(x.len(), self.v.len());
        let mut e = Vec::with_capacity(x.len());
        for t in 0..x.len() {
            let mut pred = 0.0;
            if t >= self.m {
                pred += self.ar.iter().enumerate().map(|(i, a)| a * x[t - 1 - i]).sum::<f64>();
            }
            for (j, th) in self.theta[t].iter().enumerate() {
                pred += th * e[t - 1 - j];
            }
            e.push(x[t] - pred);
        }
        debug_assert!(self.theta.iter().skip(self.m).all(|r| r.len() <= self.q));
        e
    }

    pub(crate) fn log_det(&self) -> f64 {
        self.v.iter().map(|v| v.ln()).sum()
    }
}

/// Exact Gaussian log-likelihood of an already differenced, mean-adjusted series.
pub fn gaussian_loglik(spec: &SarimaSpec, params: &SarimaParams, diff_series: &[f64]) -> Result<f64> {
    params.check_shape(spec)?;
    let (ar, ma) = expand_polynomials(spec, params);
    if !is_stable(&ar) || !is_stable(&ma.iter().map(|t| -t).collect::<Vec<_>>()) {
        return Err(Error::NonStationaryParams);
    }
    let n = diff_series.len();
    let inn = Innovations::new(&ar, &ma, n)?;
    let e = inn.errors(diff_series);
    let quad: f64 = e.iter().zip(&inn.v).map(|(e, v)| e * e / v).sum();
    let ll = -0.5 * (n as f64 * (2.0 * PI * params.sigma2).ln() + inn.log_det() + quad / params.sigma2);
    if !ll.is_finite() {
        return Err(Error::NumericalBreakdown("log-likelihood is not finite".into()));
    }
    Ok(ll)
}
