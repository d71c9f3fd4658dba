//! Derivative-free Nelder–Mead simplex minimizer.
//!
//! Uses the dimension-adaptive coefficients of Gao & Han, which behave much
//! better than the classic (1, 2, 0.5, 0.5) set once the problem has more
//! than a handful of parameters.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MinimizeOptions {
    pub max_iters: usize,
    /// Simplex diameter (max-norm distance to the best vertex) below which we stop.
    pub x_tol: f64,
    /// Spread of objective values across the simplex below which we stop.
    pub f_tol: f64,
    /// Edge length of the initial simplex.
    pub initial_step: f64,
}

impl Default for MinimizeOptions {
    fn default() -> Self {
        Self {
            max_iters: 5000,
            x_tol: 1e-8,
            f_tol: 1e-10,
            initial_step: 0.1,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OptimResult {
    pub argmin: Vec<f64>,
    pub objective_value: f64,
    pub iterations: usize,
    pub converged: bool,
}

/// Minimizes `objective` starting from `x0`.
///
/// Non-finite objective values away from the start are treated as `+inf`,
/// which lets callers encode hard constraints by returning `NaN`.
pub fn minimize<F>(objective: F, x0: &[f64], options: &MinimizeOptions) -> Result<OptimResult>
where
    F: Fn(&[f64]) -> f64,
{
    let f0 = objective(x0);
    if !f0.is_finite() {
        return Err(Error::NonFiniteObjectiveAtStart);
    }
    let n = x0.len();
    if n == 0 {
        return Ok(OptimResult {
            argmin: Vec::new(),
            objective_value: f0,
            iterations: 0,
            converged: true,
        });
    }
    let eval = |x: &[f64]| {
        let v = objective(x);
        if v.is_finite() {
            v
        } else {
            f64::INFINITY
        }
    };

    let nf = n as f64;
    let alpha = 1.0;
    let gamma = 1.0 + 2.0 / nf;
    let rho = 0.75 - 1.0 / (2.0 * nf);
    let sigma = 1.0 - 1.0 / nf;

    let mut simplex: Vec<(Vec<f64>, f64)> = Vec::with_capacity(n + 1);
    simplex.push((x0.to_vec(), f0));
    for i in 0..n {
        let mut x = x0.to_vec();
        x[i] += options.initial_step;
        let f = eval(&x);
        simplex.push((x, f));
    }

    let mut iterations = 0;
    let mut converged = false;
    loop {
        simplex.sort_by(|a, b| a.1.total_cmp(&b.1));
        let best = &simplex[0];
        let spread = simplex[n].1 - best.1;
        let diameter = simplex[1..]
            .iter()
            .flat_map(|(x, _)| x.iter().zip(&best.0).map(|(a, b)| (a - b).abs()))
            .fold(0.0_f64, f64::max);
        if diameter < options.x_tol || spread < options.f_tol {
            converged = true;
            break;
        }
        if iterations >= options.max_iters {
            break;
        }
        iterations += 1;

        let mut centroid = vec![0.0; n];
        for (x, _) in &simplex[..n] {
            for (c, xi) in centroid.iter_mut().zip(x) {
                *c += xi / nf;
            }
        }
        let along = |t: f64| -> Vec<f64> {
            centroid
                .iter()
                .zip(&simplex[n].0)
                .map(|(c, w)| c + t * (c - w))
                .collect()
        };

        let xr = along(alpha);
        let fr = eval(&xr);
        if fr < simplex[0].1 {
            let xe = along(gamma);
            let fe = eval(&xe);
            simplex[n] = if fe < fr { (xe, fe) } else { (xr, fr) };
            continue;
        }
        if fr < simplex[n - 1].1 {
            simplex[n] = (xr, fr);
            continue;
        }
        let (xc, fc) = if fr < simplex[n].1 {
            let xc = along(alpha * rho);
            let fc = eval(&xc);
            (xc, fc)
        } else {
            let xc = along(-rho);
            let fc = eval(&xc);
            (xc, fc)
        };
        if fc < simplex[n].1.min(fr) {
            simplex[n] = (xc, fc);
            continue;
        }
        // shrink toward the best vertex
        let best = simplex[0].0.clone();
        for (x, f) in simplex.iter_mut().skip(1) {
            for (xi, bi) in x.iter_mut().zip(&best) {
                *xi = bi + sigma * (*xi - bi);
            }
            *f = eval(x);
        }
    }

    simplex.sort_by(|a, b| a.1.total_cmp(&b.1));
    let (argmin, objective_value) = simplex.swap_remove(0);
    Ok(OptimResult {
        argmin,
        objective_value,
        iterations,
        converged,
    })
}

/// Runs [`minimize`], then restarts once from the incumbent with a smaller
/// simplex if the first pass did not converge.
pub fn minimize_with_restart<F>(objective: F, x0: &[f64], options: &MinimizeOptions) -> Result<OptimResult>
where
    F: Fn(&[f64]) -> f64,
{
    let first = minimize(&objective, x0, options)?;
    if first.converged {
        return Ok(first);
    }
    let retry = MinimizeOptions {
        initial_step: options.initial_step * 0.25,
        ..*options
    };
    let second = minimize(&objective, &first.argmin, &retry)?;
    Ok(OptimResult {
        iterations: first.iterations + second.iterations,
        ..second
    })
}
