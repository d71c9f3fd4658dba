//! Maximum-likelihood fitting of regression models with SARIMA errors.
//!
//! The response and every regressor are differenced with the model's
//! differencing polynomial; a constant column is then added on the
//! differenced scale (the mean, or the drift when `d + D > 0`). Regression
//! coefficients and the innovation variance are profiled out by GLS, so the
//! simplex search only runs over the ARMA coefficients in their
//! unconstrained (partial-autocorrelation) parameterization.

use std::f64::consts::PI;

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use super::likelihood::Innovations;
use super::model::{coefficients_from_free, difference, expand_polynomials, SarimaParams, SarimaSpec};
use crate::error::{Error, Result};
use crate::numkit::{minimize, minimize_with_restart, MinimizeOptions};
use crate::series::MonthlySeries;

/// A fitted SARIMA model.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SarimaFit {
    pub spec: SarimaSpec,
    pub params: SarimaParams,
    pub loglik: f64,
    pub aicc: f64,
    pub adj_r2: f64,
    /// One-step-ahead predictions on the original scale, starting at
    /// observation `spec.warm_up()`.
    pub one_step_preds: Vec<f64>,
    pub residuals: Vec<f64>,
    pub n_params: usize,
    pub converged: bool,
}

impl SarimaFit {
    /// Index of the first observation covered by `one_step_preds`.
    pub fn window_start(&self) -> usize {
        self.spec.warm_up()
    }
}

/// AICc with `k` estimated parameters and `n` effective observations.
pub fn aicc(loglik: f64, k: usize, n: usize) -> f64 {
    let (k, n) = (k as f64, n as f64);
    if n - k - 1.0 <= 0.0 {
        return f64::INFINITY;
    }
    -2.0 * loglik + 2.0 * k + 2.0 * k * (k + 1.0) / (n - k - 1.0)
}

/// Adjusted R² of one-step predictions against the aligned observations.
pub fn adjusted_r2(actual: &[f64], predicted: &[f64], n_params: usize) -> Result<f64> {
    if actual.len() != predicted.len() {
        return Err(Error::BadArgs(format!(
            "{} observations but {} predictions",
            actual.len(),
            predicted.len()
        )));
    }
    let n = actual.len();
    if n < n_params + 2 {
        return Err(Error::TooShort {
            needed: n_params + 2,
            have: n,
        });
    }
    let mean = actual.iter().sum::<f64>() / n as f64;
    let sst: f64 = actual.iter().map(|y| (y - mean).powi(2)).sum();
    if sst <= 0.0 {
        return Err(Error::DegenerateVariance);
    }
    let sse: f64 = actual.iter().zip(predicted).map(|(y, p)| (y - p).powi(2)).sum();
    let r2 = 1.0 - sse / sst;
    Ok(1.0 - (1.0 - r2) * (n as f64 - 1.0) / (n as f64 - n_params as f64 - 1.0))
}

pub(crate) fn ml_options(dim: usize) -> MinimizeOptions {
    MinimizeOptions {
        max_iters: 400 * (dim + 1),
        x_tol: 1e-6,
        f_tol: 1e-9,
        initial_step: 0.2,
    }
}

/// Likelihood at fixed ARMA coefficients with β and σ² concentrated out.
pub(crate) struct Profile {
    pub beta: Vec<f64>,
    pub sigma2: f64,
    pub loglik: f64,
    pub errors: Vec<f64>,
    /// Innovation variances relative to σ².
    pub v: Vec<f64>,
}

/// Result of a full ML fit.
#[derive(Debug, Clone)]
pub(crate) struct RegArimaEstimate {
    pub free: Vec<f64>,
    pub params: SarimaParams,
    pub beta: Vec<f64>,
    pub loglik: f64,
    pub errors: Vec<f64>,
    pub v: Vec<f64>,
    pub converged: bool,
}

/// Log-likelihood contribution of differenced observations `skip..`, i.e.
/// the conditional density given the earlier observations.
pub(crate) fn tail_loglik(errors: &[f64], v: &[f64], sigma2: f64, skip: usize) -> f64 {
    errors
        .iter()
        .zip(v)
        .skip(skip)
        .map(|(e, v)| -0.5 * ((2.0 * PI * sigma2 * v).ln() + e * e / (sigma2 * v)))
        .sum()
}

/// Screening result from conditional sum of squares.
#[derive(Debug, Clone)]
pub(crate) struct CssEstimate {
    pub free: Vec<f64>,
}

pub(crate) struct RegArima<'a> {
    pub spec: SarimaSpec,
    pub y: &'a [f64],
    w: Vec<f64>,
    /// Differenced regressors; column 0 is the constant.
    cols: Vec<Vec<f64>>,
}

impl<'a> RegArima<'a> {
    pub fn new(spec: SarimaSpec, y: &'a [f64], exog: &[&[f64]]) -> Result<Self> {
        spec.validate()?;
        let w = difference(y, spec.d, spec.seasonal_d)?;
        let mut cols = vec![vec![1.0; w.len()]];
        for x in exog {
            if x.len() != y.len() {
                return Err(Error::BadArgs("regressor length differs from series".into()));
            }
            cols.push(difference(x, spec.d, spec.seasonal_d)?);
        }
        Ok(Self { spec, y, w, cols })
    }

    pub fn n_obs(&self) -> usize {
        self.w.len()
    }

    pub fn n_beta(&self) -> usize {
        self.cols.len()
    }

    /// ARMA coefficients + regression coefficients + innovation variance.
    pub fn n_params(&self) -> usize {
        self.spec.n_coefficients() + self.n_beta() + 1
    }

    pub fn params_from_free(&self, free: &[f64], sigma2: f64, mean_term: f64) -> SarimaParams {
        let (phi, theta, sphi, stheta) = coefficients_from_free(&self.spec, free);
        SarimaParams {
            phi,
            theta,
            sphi,
            stheta,
            sigma2,
            mean_term,
        }
    }

    fn innovations(&self, free: &[f64]) -> Result<Innovations> {
        let params = self.params_from_free(free, 1.0, 0.0);
        let (ar, ma) = expand_polynomials(&self.spec, &params);
        Innovations::new(&ar, &ma, self.w.len())
    }

    pub fn profile(&self, free: &[f64]) -> Result<Profile> {
        let inn = self.innovations(free)?;
        let n = self.w.len();
        let k = self.cols.len();
        let scale: Vec<f64> = inn.v.iter().map(|v| 1.0 / v.sqrt()).collect();
        let ey = inn.errors(&self.w);
        let ex: Vec<Vec<f64>> = self.cols.iter().map(|c| inn.errors(c)).collect();

        let mut xtx = DMatrix::<f64>::zeros(k, k);
        let mut xty = DVector::<f64>::zeros(k);
        for t in 0..n {
            let s2 = scale[t] * scale[t];
            for a in 0..k {
                xty[a] += ex[a][t] * ey[t] * s2;
                for b in 0..=a {
                    xtx[(a, b)] += ex[a][t] * ex[b][t] * s2;
                }
            }
        }
        for a in 0..k {
            for b in 0..a {
                xtx[(b, a)] = xtx[(a, b)];
            }
        }
        let beta = xtx
            .cholesky()
            .ok_or_else(|| Error::DegenerateInput("regressors are collinear after differencing".into()))?
            .solve(&xty);

        let errors: Vec<f64> = (0..n)
            .map(|t| ey[t] - (0..k).map(|a| beta[a] * ex[a][t]).sum::<f64>())
            .collect();
        let ss: f64 = errors.iter().zip(&scale).map(|(e, s)| (e * s).powi(2)).sum();
        let sigma2 = ss / n as f64;
        if !(sigma2 > 0.0) || !sigma2.is_finite() {
            return Err(Error::NumericalBreakdown("zero residual variance".into()));
        }
        let nf = n as f64;
        let loglik = -0.5 * (nf * (2.0 * PI * sigma2).ln() + inn.log_det() + nf);
        Ok(Profile {
            beta: beta.iter().copied().collect(),
            sigma2,
            loglik,
            errors,
            v: inn.v,
        })
    }

    /// Full log-likelihood at explicit `(free, beta, ln sigma2)`.
    pub fn full_loglik(&self, free: &[f64], beta: &[f64], log_sigma2: f64) -> Result<f64> {
        let inn = self.innovations(free)?;
        let n = self.w.len();
        let resid: Vec<f64> = (0..n)
            .map(|t| {
                self.w[t]
                    - self
                        .cols
                        .iter()
                        .zip(beta)
                        .map(|(c, b)| c[t] * b)
                        .sum::<f64>()
            })
            .collect();
        let e = inn.errors(&resid);
        let sigma2 = log_sigma2.exp();
        let quad: f64 = e.iter().zip(&inn.v).map(|(e, v)| e * e / v).sum();
        Ok(-0.5 * (n as f64 * (2.0 * PI * sigma2).ln() + inn.log_det() + quad / sigma2))
    }

    /// Conditional sum of squares fit; the regression part is held at OLS.
    pub fn css_fit(&self, max_iters: usize) -> Result<CssEstimate> {
        let n = self.w.len();
        let k = self.cols.len();
        let design = DMatrix::from_fn(n, k, |t, a| self.cols[a][t]);
        let ols = crate::numkit::ols_fit(&design, &self.w)
            .map_err(|_| Error::DegenerateInput("regressors are collinear after differencing".into()))?;
        let x = ols.residuals;
        let start_t = self.spec.ar_lags();
        if n <= start_t + self.spec.n_coefficients() + 2 {
            return Err(Error::TooShort {
                needed: start_t + self.spec.n_coefficients() + 3,
                have: n,
            });
        }
        let sum_sq = |free: &[f64]| -> f64 {
            let params = self.params_from_free(free, 1.0, 0.0);
            let (ar, ma) = expand_polynomials(&self.spec, &params);
            let mut e = vec![0.0; n];
            let mut ss = 0.0;
            for t in start_t..n {
                let mut v = x[t];
                for (i, a) in ar.iter().enumerate() {
                    v -= a * x[t - 1 - i];
                }
                for (j, b) in ma.iter().enumerate() {
                    if t > j {
                        v -= b * e[t - 1 - j];
                    }
                }
                e[t] = v;
                ss += v * v;
            }
            ss
        };
        let dim = self.spec.n_coefficients();
        let options = MinimizeOptions {
            max_iters,
            x_tol: 1e-4,
            f_tol: 1e-8,
            initial_step: 0.2,
        };
        let total_ss: f64 = x.iter().map(|v| v * v).sum();
        if total_ss <= 0.0 {
            return Err(Error::DegenerateVariance);
        }
        // normalizing keeps f_tol meaningful across data scales
        let res = minimize(|u| (sum_sq(u) / total_ss).ln(), &vec![0.0; dim], &options)?;
        Ok(CssEstimate { free: res.argmin })
    }

    pub fn ml_fit(&self, start: &[f64]) -> Result<RegArimaEstimate> {
        let dim = self.spec.n_coefficients();
        let objective = |u: &[f64]| match self.profile(u) {
            Ok(p) => -p.loglik,
            Err(_) => f64::NAN,
        };
        let mut start = start.to_vec();
        if !objective(&start).is_finite() {
            start = vec![0.0; dim];
        }
        let res = minimize_with_restart(objective, &start, &ml_options(dim)).map_err(|e| match e {
            Error::NonFiniteObjectiveAtStart => match self.profile(&vec![0.0; dim]) {
                Err(inner) => inner,
                Ok(_) => Error::OptimizerFailed,
            },
            other => other,
        })?;
        let prof = self.profile(&res.argmin)?;
        let params = self.params_from_free(&res.argmin, prof.sigma2, prof.beta[0]);
        Ok(RegArimaEstimate {
            free: res.argmin,
            params,
            beta: prof.beta,
            loglik: prof.loglik,
            errors: prof.errors,
            v: prof.v,
            converged: res.converged,
        })
    }

    /// Original-scale one-step predictions over the post-warm-up window.
    pub fn one_step_preds(&self, errors: &[f64]) -> Vec<f64> {
        let warm = self.spec.warm_up();
        self.y[warm..].iter().zip(errors).map(|(y, e)| y - e).collect()
    }

    pub fn aligned_actual(&self) -> &[f64] {
        &self.y[self.spec.warm_up()..]
    }
}

pub(crate) fn check_length(spec: &SarimaSpec, len: usize, n_params: usize) -> Result<()> {
    let needed = n_params + spec.warm_up() + 10;
    if len < needed {
        return Err(Error::TooShort { needed, have: len });
    }
    Ok(())
}

pub(crate) fn finish_fit(model: &RegArima<'_>, est: RegArimaEstimate) -> Result<SarimaFit> {
    let n_params = model.n_params();
    let one_step_preds = model.one_step_preds(&est.errors);
    let adj_r2 = adjusted_r2(model.aligned_actual(), &one_step_preds, n_params)?;
    Ok(SarimaFit {
        spec: model.spec,
        params: est.params,
        loglik: est.loglik,
        aicc: aicc(est.loglik, n_params, model.n_obs()),
        adj_r2,
        one_step_preds,
        residuals: est.errors,
        n_params,
        converged: est.converged,
    })
}

/// Fits a SARIMA model to raw values by exact Gaussian maximum likelihood.
pub fn fit_sarima_values(values: &[f64], spec: &SarimaSpec) -> Result<SarimaFit> {
    fit_sarima_from(values, spec, None)
}

pub(crate) fn fit_sarima_from(values: &[f64], spec: &SarimaSpec, start: Option<&[f64]>) -> Result<SarimaFit> {
    let (model, est) = estimate(values, spec, start)?;
    finish_fit(&model, est)
}

pub(crate) fn estimate<'a>(
    values: &'a [f64],
    spec: &SarimaSpec,
    start: Option<&[f64]>,
) -> Result<(RegArima<'a>, RegArimaEstimate)> {
    spec.validate()?;
    check_length(spec, values.len(), spec.n_coefficients() + 2)?;
    let model = RegArima::new(*spec, values, &[])?;
    let start = match start {
        Some(s) => s.to_vec(),
        None => model
            .css_fit(200 * (spec.n_coefficients() + 1))
            .map(|c| c.free)
            .unwrap_or_else(|_| vec![0.0; spec.n_coefficients()]),
    };
    let est = model.ml_fit(&start)?;
    Ok((model, est))
}

/// Fits a SARIMA model to a monthly series.
pub fn fit_sarima(series: &MonthlySeries, spec: &SarimaSpec) -> Result<SarimaFit> {
    fit_sarima_values(&series.values, spec)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sarima::simulate_sarima;

    #[test]
    fn adjusted_r2_examples() {
        let y = [1.0, 2.0, 3.0, 4.0];
        assert_eq!(adjusted_r2(&y, &y, 1).unwrap(), 1.0);
        assert!(adjusted_r2(&y, &[2.5; 4], 0).unwrap().abs() < 1e-15);
        let v = adjusted_r2(&y, &[1.0, 2.0, 3.0, 5.0], 1).unwrap();
        assert!((v - 0.7).abs() < 1e-12);
        assert_eq!(adjusted_r2(&[2.0; 5], &[2.0; 5], 1), Err(Error::DegenerateVariance));
    }

    #[test]
    fn aicc_penalty_grows_with_parameters() {
        assert!(aicc(-100.0, 4, 150) > aicc(-100.0, 3, 150));
        assert_eq!(aicc(-1.0, 10, 11), f64::INFINITY);
    }

    #[test]
    fn too_short_for_spec() {
        let spec = SarimaSpec::arima(2, 1, 3).unwrap();
        let r = fit_sarima_values(&[1.0, 2.0, 3.0, 4.0, 5.0], &spec);
        assert!(matches!(r, Err(Error::TooShort { .. })));
    }

    #[test]
    fn recovers_ar1() {
        let spec = SarimaSpec::arima(1, 0, 0).unwrap();
        let truth = SarimaParams {
            phi: vec![0.7],
            mean_term: 20.0,
            ..SarimaParams::white_noise(&spec)
        };
        let y = simulate_sarima(&spec, &truth, 500, 7).unwrap();
        let fit = fit_sarima_values(&y, &spec).unwrap();
        assert!((0.62..=0.78).contains(&fit.params.phi[0]), "{:?}", fit.params);
        assert!((fit.params.mean_term - 20.0).abs() < 0.5);
        assert_eq!(fit.one_step_preds.len(), 500);
        let expected = aicc(fit.loglik, fit.n_params, 500);
        assert_eq!(fit.aicc, expected);
    }

    #[test]
    fn recovers_ma1() {
        let spec = SarimaSpec::arima(0, 0, 1).unwrap();
        let truth = SarimaParams {
            theta: vec![0.5],
            ..SarimaParams::white_noise(&spec)
        };
        let y = simulate_sarima(&spec, &truth, 500, 19).unwrap();
        let fit = fit_sarima_values(&y, &spec).unwrap();
        assert!((0.4..=0.6).contains(&fit.params.theta[0]), "{:?}", fit.params);
    }

    #[test]
    fn differenced_window_is_shorter() {
        let spec = SarimaSpec::arima(0, 1, 1).unwrap();
        let truth = SarimaParams {
            theta: vec![-0.3],
            ..SarimaParams::white_noise(&spec)
        };
        let y = simulate_sarima(&spec, &truth, 120, 5).unwrap();
        let fit = fit_sarima_values(&y, &spec).unwrap();
        assert_eq!(fit.one_step_preds.len(), 119);
        assert_eq!(fit.residuals.len(), 119);
        for (i, (p, r)) in fit.one_step_preds.iter().zip(&fit.residuals).enumerate() {
            assert!((p + r - y[i + 1]).abs() < 1e-9);
        }
    }

    #[test]
    fn profile_matches_full_likelihood_at_its_optimum() {
        let spec = SarimaSpec::arima(1, 0, 1).unwrap();
        let truth = SarimaParams {
            phi: vec![0.5],
            theta: vec![0.2],
            mean_term: 3.0,
            ..SarimaParams::white_noise(&spec)
        };
        let y = simulate_sarima(&spec, &truth, 80, 1).unwrap();
        let model = RegArima::new(spec, &y, &[]).unwrap();
        let free = [0.4, -0.1];
        let prof = model.profile(&free).unwrap();
        let full = model.full_loglik(&free, &prof.beta, prof.sigma2.ln()).unwrap();
        assert!((prof.loglik - full).abs() < 1e-8);
        // profile is a maximum over beta and sigma2
        let off = model.full_loglik(&free, &[prof.beta[0] + 0.05], prof.sigma2.ln() + 0.01).unwrap();
        assert!(off < full);
    }
}
