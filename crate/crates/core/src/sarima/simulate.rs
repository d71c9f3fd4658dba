use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};

use super::model::{differencing_lags, expand_polynomials, is_stable, SarimaParams, SarimaSpec};
use crate::error::{Error, Result};

/// Draws a SARIMA sample path of length `n`.
///
/// The stationary ARMA part runs through a burn-in of
/// `10 * (p + q + 12P + 12Q + 1)` discarded values and is then integrated
/// `d` and `D` times from zero initial values. `mean_term` is the mean of
/// the differenced process.
pub fn simulate_sarima(spec: &SarimaSpec, params: &SarimaParams, n: usize, seed: u64) -> Result<Vec<f64>> {
    spec.validate()?;
    params.check_shape(spec)?;
    if n == 0 {
        return Err(Error::BadArgs("n must be at least 1".into()));
    }
    let (ar, ma) = expand_polynomials(spec, params);
    if !is_stable(&ar) || !is_stable(&ma.iter().map(|t| -t).collect::<Vec<_>>()) {
        return Err(Error::NonStationaryParams);
    }
    let warm = spec.warm_up();
    if n <= warm {
        return Err(Error::TooShort { needed: warm + 1, have: n });
    }

    let burn = 10 * (ar.len() + ma.len() + 1);
    let total = burn + n - warm;
    let noise = Normal::new(0.0, params.sigma2.sqrt()).map_err(|e| Error::BadArgs(e.to_string()))?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let eps: Vec<f64> = (0..total).map(|_| noise.sample(&mut rng)).collect();

    let mut x = vec![0.0; total];
    for t in 0..total {
        let mut v = eps[t];
        for (i, a) in ar.iter().enumerate() {
            if t > i {
                v += a * x[t - 1 - i];
            }
        }
        for (j, b) in ma.iter().enumerate() {
            if t > j {
                v += b * eps[t - 1 - j];
            }
        }
        x[t] = v;
    }
    let w = x[burn..].iter().map(|v| v + params.mean_term);

    let lags = differencing_lags(spec.d, spec.seasonal_d);
    let mut out = vec![0.0; warm];
    for wt in w {
        let t = out.len();
        let carry: f64 = lags.iter().enumerate().map(|(k, c)| c * out[t - 1 - k]).sum();
        out.push(wt + carry);
    }
    Ok(out)
}
