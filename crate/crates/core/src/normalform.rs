//! Second-order normal form.
//!
//! The quadratic model is carried into modal coordinates `x = Phi y`,
//!
//! ```text
//! y_i' = lambda_i y_i + sum_{p,q} C[i][p][q] y_p y_q
//! ```
//!
//! and the near-identity change `y = z + h2(z, z)` with
//! `h2[i][p][q] = C[i][p][q] / (lambda_p + lambda_q - lambda_i)` removes the
//! quadratic terms. All sums run over ordered `(p, q)` and both tensors are
//! symmetric in `(p, q)`.

use nalgebra::DMatrix;
use num_complex::Complex64;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::modal::ModalBasis;
use crate::sysmodel::QuadraticModel;
use crate::tensor::Tensor3;

pub const DEFAULT_DENOM_TOL: f64 = 1e-6;
const INVERSION_TOL: f64 = 1e-12;
const INVERSION_MAX_ITER: usize = 20;

/// A `(i, p, q)` triple, `p <= q`, whose denominator was too small to divide by.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ResonantTriple {
    pub i: usize,
    pub p: usize,
    pub q: usize,
    pub denom: f64,
}

#[derive(Debug, Clone)]
pub struct SecondOrderNF {
    c: Tensor3,
    h2: Tensor3,
    resonant: Vec<ResonantTriple>,
    denom_tol: f64,
}

impl SecondOrderNF {
    pub fn c(&self) -> &Tensor3 {
        &self.c
    }

    pub fn h2(&self) -> &Tensor3 {
        &self.h2
    }

    /// Triples dropped from `h2`, ordered by `(i, p, q)`.
    pub fn resonant(&self) -> &[ResonantTriple] {
        &self.resonant
    }

    /// Resonant triples whose quadratic coefficient is nonzero, i.e. those
    /// that actually change the transformation.
    pub fn active_resonances(&self) -> impl Iterator<Item = &ResonantTriple> {
        self.resonant
            .iter()
            .filter(|r| self.c.get(r.i, r.p, r.q).norm() > 0.0)
    }

    pub fn denom_tol(&self) -> f64 {
        self.denom_tol
    }

    pub fn n(&self) -> usize {
        self.h2.dim()
    }

    /// Human-readable notes for every dropped term with a nonzero coefficient.
    pub fn warnings(&self) -> Vec<String> {
        self.active_resonances()
            .map(|r| {
                format!(
                    "near-resonance: |lambda_{} + lambda_{} - lambda_{}| = {:.3e} <= {:.1e}; h2 term dropped",
                    r.p + 1,
                    r.q + 1,
                    r.i + 1,
                    r.denom,
                    self.denom_tol
                )
            })
            .collect()
    }

    /// Quadratic coefficients and normal form in one call.
    pub fn build(model: &QuadraticModel, basis: &ModalBasis, denom_tol: f64) -> Result<Self> {
        let c = second_order_coeffs(model, basis)?;
        h2_coefficients(c, basis.lambdas(), denom_tol)
    }

    /// `h2(z, z)_i = sum_{p,q} h2[i][p][q] z_p z_q`.
    pub fn apply(&self, z: &[Complex64]) -> Vec<Complex64> {
        (0..self.n()).map(|i| self.h2.bilinear(i, z, z)).collect()
    }
}

/// Modal quadratic coefficients
/// `C[i][p][q] = 1/2 sum_l psi_il (phi_p^T H_l phi_q)`.
pub fn second_order_coeffs(model: &QuadraticModel, basis: &ModalBasis) -> Result<Tensor3> {
    let n = model.n();
    if basis.n() != n {
        return Err(Error::Dimension {
            what: "modal basis",
            expected: n,
            found: basis.n(),
        });
    }
    let phi = basis.phi();
    let phi_t = phi.transpose();
    // Phi^T H_l Phi for every state equation l.
    let projected: Vec<Option<DMatrix<Complex64>>> = model
        .hessians()
        .par_iter()
        .map(|h| {
            if h.iter().all(|v| *v == 0.0) {
                None
            } else {
                let hc = h.map(|v| Complex64::new(v, 0.0));
                Some(&phi_t * hc * phi)
            }
        })
        .collect();

    let psi = basis.psi();
    let slices: Vec<Vec<Complex64>> = (0..n)
        .into_par_iter()
        .map(|i| {
            let mut block = vec![Complex64::new(0.0, 0.0); n * n];
            for (l, m) in projected.iter().enumerate() {
                let Some(m) = m else { continue };
                let w = psi[(i, l)] * 0.5;
                for p in 0..n {
                    for q in 0..n {
                        block[p * n + q] += w * m[(p, q)];
                    }
                }
            }
            block
        })
        .collect();
    let mut c = Tensor3::from_slices(n, slices);
    c.symmetrize();
    Ok(c)
}

/// Normal-form coefficients with small-denominator detection.
///
/// Entries with `|lambda_p + lambda_q - lambda_i| <= denom_tol` are set to
/// zero and recorded in the resonance ledger instead.
pub fn h2_coefficients(c: Tensor3, lambdas: &[Complex64], denom_tol: f64) -> Result<SecondOrderNF> {
    let n = c.dim();
    if lambdas.len() != n {
        return Err(Error::Dimension {
            what: "eigenvalues",
            expected: n,
            found: lambdas.len(),
        });
    }
    if !(denom_tol > 0.0 && denom_tol.is_finite()) {
        return Err(Error::InvalidInput(format!(
            "denominator tolerance must be positive, got {denom_tol}"
        )));
    }
    let mut h2 = Tensor3::zeros(n);
    let mut resonant = Vec::new();
    for i in 0..n {
        for p in 0..n {
            for q in p..n {
                let denom = lambdas[p] + lambdas[q] - lambdas[i];
                let mag = denom.norm();
                if mag <= denom_tol {
                    resonant.push(ResonantTriple {
                        i,
                        p,
                        q,
                        denom: mag,
                    });
                    continue;
                }
                let v = c.get(i, p, q) / denom;
                h2.set(i, p, q, v);
                h2.set(i, q, p, v);
            }
        }
    }
    Ok(SecondOrderNF {
        c,
        h2,
        resonant,
        denom_tol,
    })
}

/// Solves `Psi x0 = z + h2(z, z)` for the normal-form initial state `z0`.
///
/// Fixed-point iteration `z <- y0 - h2(z, z)` from `z = y0`. The first
/// iterate is the classical one-step approximation.
pub fn invert_initial_condition(
    basis: &ModalBasis,
    nf: &SecondOrderNF,
    x0: &[f64],
) -> Result<Vec<Complex64>> {
    let n = basis.n();
    if x0.len() != n {
        return Err(Error::Dimension {
            what: "initial state",
            expected: n,
            found: x0.len(),
        });
    }
    let psi = basis.psi();
    let y0: Vec<Complex64> = (0..n)
        .map(|i| (0..n).map(|k| psi[(i, k)] * x0[k]).sum())
        .collect();
    let mut z = y0.clone();
    let mut last = f64::INFINITY;
    for _ in 0..INVERSION_MAX_ITER {
        let hz = nf.apply(&z);
        let next: Vec<Complex64> = y0.iter().zip(&hz).map(|(y, h)| y - h).collect();
        let delta = next
            .iter()
            .zip(&z)
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max);
        z = next;
        if !delta.is_finite() {
            break;
        }
        last = delta;
        if delta < INVERSION_TOL {
            return Ok(z);
        }
    }
    Err(Error::InversionNotConverged { residual: last })
}

/// Trajectory rebuilt from the normal form on a time grid.
#[derive(Debug, Clone)]
pub struct Reconstruction {
    pub times: Vec<f64>,
    /// `n x T`, column `j` is the state at `times[j]`.
    pub states: DMatrix<f64>,
    /// Largest imaginary part discarded when taking `Re(Phi y)`.
    pub max_imag: f64,
}

/// `x(t) = Phi y(t)` with `z_i(t) = z_i0 e^{lambda_i t}` and
/// `y_i(t) = z_i(t) + sum_{p,q} h2[i][p][q] z_p0 z_q0 e^{(lambda_p + lambda_q) t}`.
pub fn reconstruct_response(
    basis: &ModalBasis,
    nf: &SecondOrderNF,
    z0: &[Complex64],
    times: &[f64],
) -> Result<Reconstruction> {
    let n = basis.n();
    if z0.len() != n {
        return Err(Error::Dimension {
            what: "normal-form initial state",
            expected: n,
            found: z0.len(),
        });
    }
    if let Some(t) = times.iter().find(|t| !(**t >= 0.0)) {
        return Err(Error::InvalidInput(format!("negative or NaN time {t}")));
    }
    let lambdas = basis.lambdas();
    let phi = basis.phi();
    let h2 = nf.h2();
    let mut states = DMatrix::zeros(n, times.len());
    let mut max_imag: f64 = 0.0;
    let mut y = vec![Complex64::new(0.0, 0.0); n];
    for (col, &t) in times.iter().enumerate() {
        let z: Vec<Complex64> = (0..n).map(|i| z0[i] * (lambdas[i] * t).exp()).collect();
        // z_p(t) z_q(t) is exactly z_p0 z_q0 e^{(lambda_p + lambda_q) t}.
        for i in 0..n {
            y[i] = z[i] + h2.bilinear(i, &z, &z);
        }
        for k in 0..n {
            let xk: Complex64 = (0..n).map(|i| phi[(k, i)] * y[i]).sum();
            max_imag = max_imag.max(xk.im.abs());
            states[(k, col)] = xk.re;
        }
    }
    Ok(Reconstruction {
        times: times.to_vec(),
        states,
        max_imag,
    })
}
