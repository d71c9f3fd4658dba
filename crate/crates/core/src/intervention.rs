//! Intervention (transfer-function-noise) model with a pure-gain impulse:
//! `y_t = c + w0 * x_t + noise_t`, where the noise follows a SARIMA model.
//!
//! With `d + D > 0` the response, the impulse, and the intercept are
//! differenced together, so `c` becomes the drift of the differenced series.

use serde::{Deserialize, Serialize};
use statrs::function::erf::erfc;

use crate::error::{Error, Result};
use crate::numkit::numerical_hessian;
use crate::sarima::{adjusted_r2, aicc, check_length, search_orders_values, RegArima, SarimaFit, SarimaParams, SarimaSpec};
use crate::series::{ImpulseSeries, MonthlySeries};
use crate::verdict::{intervention_gate, Method, MethodVerdict};

/// Which noise-order attempt produced the final model.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Attempt {
    /// Orders copied from the plain SARIMA fit.
    SameOrders,
    /// Orders searched on the series with event months smoothed out.
    ReplacedOrders,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct InterventionFit {
    pub noise_spec: SarimaSpec,
    pub noise_params: SarimaParams,
    pub c: f64,
    pub w0: f64,
    pub w0_se: f64,
    pub w0_pvalue: f64,
    pub loglik: f64,
    pub adj_r2: f64,
    pub aicc: f64,
    pub n_params: usize,
    pub attempt: Attempt,
    pub one_step_preds: Vec<f64>,
    pub converged: bool,
    /// Warnings collected during attempt selection.
    pub note: Option<String>,
}

/// Two-sided normal p-value for `estimate / se`.
pub fn two_sided_pvalue(estimate: f64, se: f64) -> f64 {
    let z = (estimate / se).abs();
    erfc(z / std::f64::consts::SQRT_2).clamp(0.0, 1.0)
}

/// Replaces every event-month value by the mean of its neighbours.
///
/// At the series ends the single available neighbour is used.
pub fn replace_event_months(series: &MonthlySeries, event_month: u32) -> Result<MonthlySeries> {
    if series.is_empty() {
        return Err(Error::EmptySeries);
    }
    if !(1..=12).contains(&event_month) {
        return Err(Error::BadMonth(event_month));
    }
    let v = &series.values;
    let n = v.len();
    let values = (0..n)
        .map(|i| {
            if series.month_at(i).month != event_month || n == 1 {
                return v[i];
            }
            match (i.checked_sub(1), (i + 1 < n).then_some(i + 1)) {
                (Some(a), Some(b)) => 0.5 * (v[a] + v[b]),
                (None, Some(b)) => v[b],
                (Some(a), None) => v[a],
                (None, None) => v[i],
            }
        })
        .collect();
    Ok(series.with_values(values))
}

/// Joint maximum-likelihood fit of the intervention model on raw values.
pub fn fit_tfn_values(values: &[f64], impulse: &[f64], noise_spec: &SarimaSpec) -> Result<InterventionFit> {
    if impulse.len() != values.len() {
        return Err(Error::BadArgs("impulse is not aligned with the series".into()));
    }
    let has_event = impulse.iter().any(|&x| x != 0.0);
    let has_quiet = impulse.contains(&0.0);
    if !(has_event && has_quiet) {
        return Err(Error::DegenerateInput("impulse series is constant".into()));
    }
    noise_spec.validate()?;
    check_length(noise_spec, values.len(), noise_spec.n_coefficients() + 3)?;

    let model = RegArima::new(*noise_spec, values, &[impulse])?;
    let dim = noise_spec.n_coefficients();
    let start = model
        .css_fit(200 * (dim + 1))
        .map(|c| c.free)
        .unwrap_or_else(|_| vec![0.0; dim]);
    let est = model.ml_fit(&start)?;

    // Hessian of the negative log-likelihood in (free ARMA, c, w0, ln σ²).
    let mut theta = est.free.clone();
    theta.extend(&est.beta);
    theta.push(est.params.sigma2.ln());
    let nb = model.n_beta();
    let neg_ll = |t: &[f64]| {
        let (free, rest) = t.split_at(dim);
        match model.full_loglik(free, &rest[..nb], rest[nb]) {
            Ok(ll) => -ll,
            Err(_) => f64::NAN,
        }
    };
    let hess = numerical_hessian(neg_ll, &theta).map_err(|_| Error::SingularHessian)?;
    let cov = hess.try_inverse().ok_or(Error::SingularHessian)?;
    let w0_index = dim + 1;
    let var = cov[(w0_index, w0_index)];
    if !(var > 0.0) || !var.is_finite() {
        return Err(Error::SingularHessian);
    }
    let w0_se = var.sqrt();
    let (c, w0) = (est.beta[0], est.beta[1]);

    let n_params = model.n_params();
    let one_step_preds = model.one_step_preds(&est.errors);
    let adj_r2 = adjusted_r2(model.aligned_actual(), &one_step_preds, n_params)?;
    Ok(InterventionFit {
        noise_spec: *noise_spec,
        noise_params: est.params,
        c,
        w0,
        w0_se,
        w0_pvalue: two_sided_pvalue(w0, w0_se),
        loglik: est.loglik,
        adj_r2,
        aicc: aicc(est.loglik, n_params, model.n_obs()),
        n_params,
        attempt: Attempt::SameOrders,
        one_step_preds,
        converged: est.converged,
        note: None,
    })
}

pub fn fit_tfn(series: &MonthlySeries, impulse: &ImpulseSeries, noise_spec: &SarimaSpec) -> Result<InterventionFit> {
    if impulse.aligned_start != series.start || impulse.len() != series.len() {
        return Err(Error::BadArgs("impulse is not aligned with the series".into()));
    }
    fit_tfn_values(&series.values, &impulse.values, noise_spec)
}

/// Picks the better of two attempts: higher adjusted R², then lower AICc,
/// then the first attempt.
pub fn better_attempt(a: InterventionFit, b: InterventionFit) -> InterventionFit {
    let b_wins = b.adj_r2 > a.adj_r2 || (b.adj_r2 == a.adj_r2 && b.aicc < a.aicc);
    if b_wins {
        b
    } else {
        a
    }
}

/// Two-attempt noise-order selection for the intervention model.
///
/// Attempt A reuses `base_fit`'s orders. Attempt B searches orders on the
/// series with event months replaced by their neighbours' mean, then fits
/// the intervention model with those orders on the original series.
pub fn select_tfn(
    series: &MonthlySeries,
    impulse: &ImpulseSeries,
    base_fit: &SarimaFit,
    seasonal: bool,
) -> Result<InterventionFit> {
    let attempt_a = fit_tfn(series, impulse, &base_fit.spec);
    let attempt_b = replace_event_months(series, impulse.event_month)
        .and_then(|replaced| search_orders_values(&replaced.values, seasonal))
        .and_then(|fit| {
            if fit.spec == base_fit.spec {
                // identical orders give an identical fit; reuse attempt A
                attempt_a.clone()
            } else {
                fit_tfn(series, impulse, &fit.spec)
            }
        })
        .map(|mut fit| {
            fit.attempt = Attempt::ReplacedOrders;
            fit
        });
    match (attempt_a, attempt_b) {
        (Ok(a), Ok(b)) => Ok(better_attempt(a, b)),
        (Ok(mut a), Err(e)) => {
            a.note = Some(format!("replaced-orders attempt failed: {e}"));
            Ok(a)
        }
        (Err(e), Ok(mut b)) => {
            b.note = Some(format!("same-orders attempt failed: {e}"));
            Ok(b)
        }
        (Err(e), Err(_)) => Err(e),
    }
}

/// Method-1 verdict: the intervention model must fit strictly better than
/// the plain model and carry a significant positive impulse coefficient.
pub fn intervention_verdict(base_fit: &SarimaFit, tfn: &InterventionFit, alpha: f64) -> MethodVerdict {
    let fits_better = tfn.adj_r2 > base_fit.adj_r2;
    let significant = intervention_gate(fits_better, tfn.w0_pvalue, tfn.w0 > 0.0, alpha);
    MethodVerdict {
        method: Method::Intervention,
        significant,
        statistic: Some(tfn.w0 / tfn.w0_se),
        value: Some(tfn.w0_pvalue),
        fits_better: Some(fits_better),
        detail: format!(
            "base {} adjR2={:.4}; tfn {} adjR2={:.4} ({:?}); w0={:.4} se={:.4} p={:.4}",
            base_fit.spec, base_fit.adj_r2, tfn.noise_spec, tfn.adj_r2, tfn.attempt, tfn.w0, tfn.w0_se, tfn.w0_pvalue
        ),
    }
}
