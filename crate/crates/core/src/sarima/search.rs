use rayon::prelude::*;

use super::fit::{aicc, check_length, estimate, finish_fit, tail_loglik, RegArima, SarimaFit};
use super::model::SarimaSpec;
use crate::error::{Error, Result};
use crate::series::MonthlySeries;

/// Candidates carried from the CSS screen into full likelihood refinement.
pub const REFINED_CANDIDATES: usize = 10;

/// Every order combination searched for the given seasonality flag.
pub fn candidate_specs(seasonal: bool) -> Vec<SarimaSpec> {
    let seasonal_orders: Vec<(usize, usize, usize)> = if seasonal {
        let mut v = Vec::new();
        for sp in 0..=2 {
            for sd in 0..=1 {
                for sq in 0..=2 {
                    v.push((sp, sd, sq));
                }
            }
        }
        v
    } else {
        vec![(0, 0, 0)]
    };
    let mut specs = Vec::new();
    for d in 0..=1 {
        for p in 0..=5 {
            for q in 0..=5 {
                for &(sp, sd, sq) in &seasonal_orders {
                    specs.push(SarimaSpec::new(p, d, q, sp, sd, sq).expect("grid orders are in range"));
                }
            }
        }
    }
    specs
}

/// Order selection by AICc over the candidate grid.
///
/// Every cell is estimated by conditional sum of squares and scored by the
/// exact likelihood at those estimates; the [`REFINED_CANDIDATES`] best are
/// refit by exact maximum likelihood and the lowest-AICc refit wins.
///
/// Candidates with different differencing orders lose different numbers of
/// leading observations, so their plain likelihoods are not comparable. For
/// ranking, every candidate's likelihood is restricted to the observations
/// after the largest warm-up in the grid (the conditional density of those
/// observations given the earlier ones), and AICc uses that common count.
pub fn search_orders_values(values: &[f64], seasonal: bool) -> Result<SarimaFit> {
    if values.len() < 60 {
        return Err(Error::TooShort {
            needed: 60,
            have: values.len(),
        });
    }
    let specs = candidate_specs(seasonal);
    let max_warm = specs.iter().map(|s| s.warm_up()).max().unwrap_or(0);
    let n_common = values.len() - max_warm;

    let mut screened: Vec<(SarimaSpec, Vec<f64>, f64)> = specs
        .into_par_iter()
        .filter_map(|spec| {
            check_length(&spec, values.len(), spec.n_coefficients() + 2).ok()?;
            let model = RegArima::new(spec, values, &[]).ok()?;
            let css = model.css_fit(150 * (spec.n_coefficients() + 1)).ok()?;
            let prof = model.profile(&css.free).ok()?;
            let tail = tail_loglik(&prof.errors, &prof.v, prof.sigma2, max_warm - spec.warm_up());
            let criterion = aicc(tail, model.n_params(), n_common);
            criterion.is_finite().then_some((spec, css.free, criterion))
        })
        .collect();
    screened.sort_by(|a, b| a.2.total_cmp(&b.2));
    screened.truncate(REFINED_CANDIDATES);

    let refined: Vec<(SarimaFit, f64)> = screened
        .into_par_iter()
        .filter_map(|(spec, start, _)| {
            let (model, est) = estimate(values, &spec, Some(&start)).ok()?;
            let tail = tail_loglik(&est.errors, &est.v, est.params.sigma2, max_warm - spec.warm_up());
            let criterion = aicc(tail, model.n_params(), n_common);
            let fit = finish_fit(&model, est).ok()?;
            (criterion.is_finite() && fit.aicc.is_finite()).then_some((fit, criterion))
        })
        .collect();
    refined
        .into_iter()
        .min_by(|a, b| a.1.total_cmp(&b.1))
        .map(|(fit, _)| fit)
        .ok_or(Error::AllFitsFailed)
}

pub fn search_orders(series: &MonthlySeries, seasonal: bool) -> Result<SarimaFit> {
    search_orders_values(&series.values, seasonal)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn grid_sizes() {
        assert_eq!(candidate_specs(false).len(), 72);
        assert_eq!(candidate_specs(true).len(), 72 * 18);
        assert!(candidate_specs(false).iter().all(|s| !s.is_seasonal()));
    }

    #[test]
    fn short_series_rejected() {
        assert!(matches!(
            search_orders_values(&[1.0; 40], false),
            Err(Error::TooShort { .. })
        ));
    }
}
