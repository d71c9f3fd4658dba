use nalgebra::DMatrix;

use crate::error::{Error, Result};

fn step(x: f64) -> f64 {
    (1e-4 * x.abs()).max(1e-4)
}

/// Central-difference Hessian of `f` at `x`, symmetrized.
pub fn numerical_hessian<F>(f: F, x: &[f64]) -> Result<DMatrix<f64>>
where
    F: Fn(&[f64]) -> f64,
{
    let n = x.len();
    let h: Vec<f64> = x.iter().map(|&xi| step(xi)).collect();
    let mut point = x.to_vec();
    let mut eval = |shifts: &[(usize, f64)]| -> Result<f64> {
        for &(i, d) in shifts {
            point[i] = x[i] + d;
        }
        let v = f(&point);
        for &(i, _) in shifts {
            point[i] = x[i];
        }
        if v.is_finite() {
            Ok(v)
        } else {
            Err(Error::NonFiniteEvaluation)
        }
    };

    let f0 = eval(&[])?;
    let mut hess = DMatrix::zeros(n, n);
    for i in 0..n {
        let fp = eval(&[(i, h[i])])?;
        let fm = eval(&[(i, -h[i])])?;
        hess[(i, i)] = (fp - 2.0 * f0 + fm) / (h[i] * h[i]);
        for j in 0..i {
            let fpp = eval(&[(i, h[i]), (j, h[j])])?;
            let fpm = eval(&[(i, h[i]), (j, -h[j])])?;
            let fmp = eval(&[(i, -h[i]), (j, h[j])])?;
            let fmm = eval(&[(i, -h[i]), (j, -h[j])])?;
            let v = (fpp - fpm - fmp + fmm) / (4.0 * h[i] * h[j]);
            hess[(i, j)] = v;
            hess[(j, i)] = v;
        }
    }
    Ok((&hess + hess.transpose()) * 0.5)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn separable_quadratic() {
        let h = numerical_hessian(|v| v[0] * v[0] + 3.0 * v[1] * v[1], &[0.0, 0.0]).unwrap();
        assert!((h[(0, 0)] - 2.0).abs() < 1e-4);
        assert!((h[(1, 1)] - 6.0).abs() < 1e-4);
        assert!(h[(0, 1)].abs() < 1e-4);
    }

    #[test]
    fn bilinear_cross_term() {
        let h = numerical_hessian(|v| v[0] * v[1], &[1.0, 1.0]).unwrap();
        assert!((h[(0, 1)] - 1.0).abs() < 1e-4);
        assert_eq!(h[(0, 1)], h[(1, 0)]);
    }

    #[test]
    fn quartic() {
        let h = numerical_hessian(|v| v[0].powi(4), &[1.0]).unwrap();
        assert!((h[(0, 0)] - 12.0).abs() < 1e-3);
    }

    #[test]
    fn non_finite_evaluation() {
        let r = numerical_hessian(|v| if v[0] > 0.0 { f64::NAN } else { 0.0 }, &[0.0]);
        assert_eq!(r, Err(Error::NonFiniteEvaluation));
    }
}
