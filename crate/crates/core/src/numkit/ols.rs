use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Condition number above which a design is treated as singular.
const MAX_CONDITION: f64 = 1e10;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OlsResult {
    pub coefficients: Vec<f64>,
    pub residuals: Vec<f64>,
    pub sse: f64,
    pub degrees_of_freedom: usize,
}

/// Least squares via the singular value decomposition.
pub fn ols_fit(x: &DMatrix<f64>, y: &[f64]) -> Result<OlsResult> {
    let (rows, cols) = x.shape();
    if rows != y.len() {
        return Err(Error::BadArgs(format!("design has {rows} rows but y has {}", y.len())));
    }
    if rows <= cols {
        return Err(Error::TooShort {
            needed: cols + 1,
            have: rows,
        });
    }
    if x.iter().any(|v| !v.is_finite()) || y.iter().any(|v| !v.is_finite()) {
        return Err(Error::NonFiniteEvaluation);
    }
    let svd = x.clone().svd(true, true);
    let smax = svd.singular_values.max();
    let smin = svd.singular_values.min();
    if smin <= 0.0 || smax / smin > MAX_CONDITION {
        return Err(Error::RankDeficient);
    }
    let yv = DVector::from_column_slice(y);
    let beta = svd
        .solve(&yv, 0.0)
        .map_err(|e| Error::NumericalBreakdown(e.to_string()))?;
    let resid = &yv - x * &beta;
    Ok(OlsResult {
        coefficients: beta.iter().copied().collect(),
        sse: resid.norm_squared(),
        residuals: resid.iter().copied().collect(),
        degrees_of_freedom: rows - cols,
    })
}
