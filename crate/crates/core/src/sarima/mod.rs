//! SARIMA(p,d,q)(P,D,Q)_12 models: representation, exact likelihood,
//! simulation, maximum-likelihood fitting, and automatic order search.

mod fit;
mod likelihood;
mod model;
mod search;
mod simulate;

pub use fit::{adjusted_r2, aicc, fit_sarima, fit_sarima_values, SarimaFit};
pub(crate) use fit::{check_length, RegArima};
pub use likelihood::{arma_autocovariance, gaussian_loglik};
pub use model::{
    coefficients_from_free, coefficients_to_free, difference, differencing_lags, expand_polynomials,
    is_stable, undifference, SarimaParams, SarimaSpec, SEASON,
};
pub use search::{candidate_specs, search_orders, search_orders_values, REFINED_CANDIDATES};
pub use simulate::simulate_sarima;
