use nalgebra::{DMatrix, DVector};

use super::quadratic::default_labels;
use super::{QuadraticModel, VectorField};
use crate::error::{Error, Result};

/// Largest per-component residual `|f(x_eq)|` accepted as an equilibrium.
pub const EQUILIBRIUM_TOL: f64 = 1e-8;

/// Default central-difference step: `max(1e-5, 1e-5 * |x_eq|_inf)`.
pub fn default_fd_step(x_eq: &[f64]) -> f64 {
    let scale = x_eq.iter().fold(0.0_f64, |m, v| m.max(v.abs()));
    (1e-5 * scale).max(1e-5)
}

/// Builds a [`QuadraticModel`] of a black-box vector field by central
/// differences around `x_eq`.
///
/// First derivatives use the two-point stencil, diagonal second derivatives
/// the three-point stencil and mixed second derivatives the four-point
/// stencil, all with the same `step`. The Hessians are symmetrized.
pub fn quadratize_finite_diff<F: VectorField + ?Sized>(
    f: &F,
    x_eq: &[f64],
    step: f64,
) -> Result<QuadraticModel> {
    let n = f.dim();
    if x_eq.len() != n {
        return Err(Error::Dimension {
            what: "x_eq",
            expected: n,
            found: x_eq.len(),
        });
    }
    if !(step > 0.0 && step.is_finite()) {
        return Err(Error::InvalidInput(format!(
            "step must be positive, got {step}"
        )));
    }

    let eval = |x: &[f64]| -> Result<Vec<f64>> {
        let mut out = vec![0.0; n];
        f.eval(x, &mut out);
        if out.iter().any(|v| !v.is_finite()) {
            return Err(Error::NonFinite(format!("vector field evaluated at {x:?}")));
        }
        Ok(out)
    };

    let f0 = eval(x_eq)?;
    let residual = f0.iter().fold(0.0_f64, |m, v| m.max(v.abs()));
    if residual > EQUILIBRIUM_TOL {
        return Err(Error::NotAtEquilibrium { residual });
    }

    let shifted = |moves: &[(usize, f64)]| -> Result<Vec<f64>> {
        let mut x = x_eq.to_vec();
        for &(j, d) in moves {
            x[j] += d;
        }
        eval(&x)
    };

    let h = step;
    let mut a = DMatrix::zeros(n, n);
    let mut hess = vec![DMatrix::zeros(n, n); n];
    let mut plus = Vec::with_capacity(n);
    let mut minus = Vec::with_capacity(n);
    for j in 0..n {
        plus.push(shifted(&[(j, h)])?);
        minus.push(shifted(&[(j, -h)])?);
    }
    for j in 0..n {
        for k in 0..n {
            a[(k, j)] = (plus[j][k] - minus[j][k]) / (2.0 * h);
            hess[k][(j, j)] = (plus[j][k] - 2.0 * f0[k] + minus[j][k]) / (h * h);
        }
    }
    for i in 0..n {
        for j in (i + 1)..n {
            let fpp = shifted(&[(i, h), (j, h)])?;
            let fpm = shifted(&[(i, h), (j, -h)])?;
            let fmp = shifted(&[(i, -h), (j, h)])?;
            let fmm = shifted(&[(i, -h), (j, -h)])?;
            for k in 0..n {
                let d = (fpp[k] - fpm[k] - fmp[k] + fmm[k]) / (4.0 * h * h);
                hess[k][(i, j)] = d;
                hess[k][(j, i)] = d;
            }
        }
    }

    QuadraticModel::new(a, hess, DVector::from_column_slice(x_eq), default_labels(n))
}
