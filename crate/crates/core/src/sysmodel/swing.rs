//! Classical multi-machine swing model over a reduced admittance network.
//!
//! Machine `i` obeys
//!
//! ```text
//! delta_i' = w_i
//! w_i'     = omega_s / (2 H_i) * (Pm_i - Pe_i(delta)) - D_i / (2 H_i) * w_i
//! Pe_i     = sum_j E_i E_j (G_ij cos(delta_i - delta_j) + B_ij sin(delta_i - delta_j))
//! ```
//!
//! with `w_i` the speed deviation in rad/s. Angles are referenced to the last
//! machine, so the state is `(delta_1 - delta_m, .., delta_{m-1} - delta_m,
//! w_1, .., w_m)` of dimension `2m - 1`.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

use super::{QuadraticModel, VectorField};
use crate::error::{Error, Result};

const NEWTON_MAX_ITER: usize = 50;
const BALANCE_TOL: f64 = 1e-10;
const POLISH_STEPS: usize = 3;

#[derive(Debug, Clone, PartialEq)]
pub struct SwingParams {
    /// Inertia constants `H_i` (s).
    pub inertia: Vec<f64>,
    /// Damping coefficients `D_i` (pu power per pu speed).
    pub damping: Vec<f64>,
    /// Mechanical input power (pu).
    pub p_mech: Vec<f64>,
    /// Internal EMF magnitudes (pu).
    pub emf: Vec<f64>,
    /// Reduced admittance matrix between internal machine nodes (pu).
    pub y: DMatrix<Complex64>,
    /// Synchronous angular frequency (rad/s).
    pub omega_s: f64,
}

impl SwingParams {
    pub fn machines(&self) -> usize {
        self.inertia.len()
    }

    pub fn validate(&self) -> Result<()> {
        let m = self.inertia.len();
        if m < 2 {
            return Err(Error::InvalidInput(
                "a swing model needs at least two machines".into(),
            ));
        }
        for (what, len) in [
            ("damping", self.damping.len()),
            ("p_mech", self.p_mech.len()),
            ("emf", self.emf.len()),
        ] {
            if len != m {
                return Err(Error::Dimension {
                    what,
                    expected: m,
                    found: len,
                });
            }
        }
        if self.y.nrows() != m || self.y.ncols() != m {
            return Err(Error::Dimension {
                what: "admittance matrix",
                expected: m,
                found: self.y.nrows().max(self.y.ncols()),
            });
        }
        let all_finite = self
            .inertia
            .iter()
            .chain(&self.damping)
            .chain(&self.p_mech)
            .chain(&self.emf)
            .all(|v| v.is_finite())
            && self.y.iter().all(|c| c.re.is_finite() && c.im.is_finite())
            && self.omega_s.is_finite();
        if !all_finite {
            return Err(Error::NonFinite("swing parameters".into()));
        }
        if let Some(h) = self.inertia.iter().find(|h| **h <= 0.0) {
            return Err(Error::InvalidInput(format!(
                "inertia must be positive, got {h}"
            )));
        }
        if self.omega_s <= 0.0 {
            return Err(Error::InvalidInput(format!(
                "omega_s must be positive, got {}",
                self.omega_s
            )));
        }
        let scale = self.y.iter().map(|c| c.norm()).fold(1.0, f64::max);
        for i in 0..m {
            for j in (i + 1)..m {
                if (self.y[(i, j)] - self.y[(j, i)]).norm() > 1e-12 * scale {
                    return Err(Error::InvalidInput(format!(
                        "admittance matrix is not symmetric at ({}, {})",
                        i + 1,
                        j + 1
                    )));
                }
            }
        }
        Ok(())
    }
}

/// The full trigonometric swing vector field in relative-angle states.
#[derive(Debug, Clone)]
pub struct SwingSystem {
    params: SwingParams,
}

impl SwingSystem {
    pub fn new(params: SwingParams) -> Result<Self> {
        params.validate()?;
        Ok(Self { params })
    }

    pub fn params(&self) -> &SwingParams {
        &self.params
    }

    pub fn machines(&self) -> usize {
        self.params.machines()
    }

    /// State index of the relative angle of machine `g` (0-based, `g < m-1`).
    pub fn angle_index(&self, g: usize) -> Option<usize> {
        (g + 1 < self.machines()).then_some(g)
    }

    /// State index of the speed deviation of machine `g` (0-based).
    pub fn speed_index(&self, g: usize) -> usize {
        self.machines() - 1 + g
    }

    pub fn labels(&self) -> Vec<String> {
        let m = self.machines();
        let mut labels: Vec<String> = (1..m).map(|i| format!("delta{i}-delta{m}")).collect();
        labels.extend((1..=m).map(|i| format!("omega{i}")));
        labels
    }

    /// Full angle vector with the reference machine at zero.
    fn angles_from_state(&self, x: &[f64]) -> Vec<f64> {
        let m = self.machines();
        let mut delta = x[..m - 1].to_vec();
        delta.push(0.0);
        delta
    }

    /// Relative-angle state at rest for the absolute angles `delta`.
    pub fn state_from_angles(&self, delta: &[f64]) -> Vec<f64> {
        let m = self.machines();
        let mut x = vec![0.0; 2 * m - 1];
        for i in 0..m - 1 {
            x[i] = delta[i] - delta[m - 1];
        }
        x
    }

    pub fn electrical_power(&self, delta: &[f64]) -> Vec<f64> {
        let p = &self.params;
        let m = p.machines();
        (0..m)
            .map(|i| {
                let mut pe = p.emf[i] * p.emf[i] * p.y[(i, i)].re;
                for j in 0..m {
                    if j == i {
                        continue;
                    }
                    let d = delta[i] - delta[j];
                    let y = p.y[(i, j)];
                    pe += p.emf[i] * p.emf[j] * (y.re * d.cos() + y.im * d.sin());
                }
                pe
            })
            .collect()
    }

    /// Gradient and Hessian of every `Pe_i` with respect to the absolute angles.
    fn power_derivatives(&self, delta: &[f64]) -> (DMatrix<f64>, Vec<DMatrix<f64>>) {
        let p = &self.params;
        let m = p.machines();
        let mut grad = DMatrix::zeros(m, m);
        let mut hess = vec![DMatrix::zeros(m, m); m];
        for i in 0..m {
            for j in 0..m {
                if j == i {
                    continue;
                }
                let d = delta[i] - delta[j];
                let y = p.y[(i, j)];
                let ee = p.emf[i] * p.emf[j];
                // term(d) = ee (G cos d + B sin d), d = delta_i - delta_j
                let d1 = ee * (-y.re * d.sin() + y.im * d.cos());
                let d2 = -ee * (y.re * d.cos() + y.im * d.sin());
                grad[(i, i)] += d1;
                grad[(i, j)] -= d1;
                let h = &mut hess[i];
                h[(i, i)] += d2;
                h[(j, j)] += d2;
                h[(i, j)] -= d2;
                h[(j, i)] -= d2;
            }
        }
        (grad, hess)
    }

    /// Analytic quadratic truncation around the relative-angle state `x_eq`.
    pub fn quadratize(&self, x_eq: &[f64]) -> Result<QuadraticModel> {
        let p = &self.params;
        let m = p.machines();
        let n = 2 * m - 1;
        let delta = self.angles_from_state(x_eq);
        let (grad, hess) = self.power_derivatives(&delta);

        let mut a = DMatrix::zeros(n, n);
        let mut h = vec![DMatrix::zeros(n, n); n];
        for i in 0..m - 1 {
            a[(i, m - 1 + i)] = 1.0;
            a[(i, n - 1)] -= 1.0;
        }
        for g in 0..m {
            let row = m - 1 + g;
            let gain = p.omega_s / (2.0 * p.inertia[g]);
            for j in 0..m - 1 {
                a[(row, j)] = -gain * grad[(g, j)];
                for l in 0..m - 1 {
                    h[row][(j, l)] = -gain * hess[g][(j, l)];
                }
            }
            a[(row, row)] = -p.damping[g] / (2.0 * p.inertia[g]);
        }
        QuadraticModel::new(a, h, DVector::from_column_slice(x_eq), self.labels())
    }
}

impl VectorField for SwingSystem {
    fn dim(&self) -> usize {
        2 * self.machines() - 1
    }

    fn eval(&self, x: &[f64], out: &mut [f64]) {
        let p = &self.params;
        let m = p.machines();
        let delta = self.angles_from_state(x);
        let pe = self.electrical_power(&delta);
        let w = &x[m - 1..];
        for i in 0..m - 1 {
            out[i] = w[i] - w[m - 1];
        }
        for g in 0..m {
            let two_h = 2.0 * p.inertia[g];
            out[m - 1 + g] =
                p.omega_s / two_h * (p.p_mech[g] - pe[g]) - p.damping[g] / two_h * w[g];
        }
    }
}

/// Newton solve of the power balance `Pm - Pe(delta) = 0`.
///
/// The last machine is the angle reference and keeps `guess[m-1]`; the
/// remaining `m - 1` balance equations determine the other angles, after
/// which the reference machine's own balance is checked.
pub fn solve_equilibrium(params: &SwingParams, guess: &[f64]) -> Result<Vec<f64>> {
    let sys = SwingSystem::new(params.clone())?;
    let m = params.machines();
    if guess.len() != m {
        return Err(Error::Dimension {
            what: "equilibrium guess",
            expected: m,
            found: guess.len(),
        });
    }
    let reference = guess[m - 1];
    let mut delta: Vec<f64> = guess.iter().map(|d| d - reference).collect();

    let residual_of = |delta: &[f64]| -> Vec<f64> {
        let pe = sys.electrical_power(delta);
        params
            .p_mech
            .iter()
            .zip(&pe)
            .map(|(pm, pe)| pm - pe)
            .collect()
    };
    let inf_norm = |v: &[f64]| v.iter().fold(0.0_f64, |a, b| a.max(b.abs()));

    let mut converged = false;
    let mut polish = 0;
    let mut res = residual_of(&delta);
    for _ in 0..NEWTON_MAX_ITER {
        if inf_norm(&res[..m - 1]) <= BALANCE_TOL {
            converged = true;
            // a couple of extra steps push the free residual to roundoff so
            // the reference machine's balance is judged on its own merit
            if polish == POLISH_STEPS || inf_norm(&res[..m - 1]) <= 1e-15 {
                break;
            }
            polish += 1;
        }
        let (grad, _) = sys.power_derivatives(&delta);
        // d(Pm - Pe)/d delta = -grad, restricted to the free angles.
        let jac = DMatrix::from_fn(m - 1, m - 1, |i, j| -grad[(i, j)]);
        let rhs = DVector::from_iterator(m - 1, res[..m - 1].iter().map(|r| -r));
        let lu = jac.lu();
        let step = lu.solve(&rhs).ok_or(Error::SingularJacobian)?;
        if step.iter().any(|s| !s.is_finite()) {
            return Err(Error::SingularJacobian);
        }
        let trial: Vec<f64> = delta
            .iter()
            .enumerate()
            .map(|(i, d)| if i + 1 < m { d + step[i] } else { *d })
            .collect();
        let trial_res = residual_of(&trial);
        if converged && inf_norm(&trial_res[..m - 1]) >= inf_norm(&res[..m - 1]) {
            break;
        }
        delta = trial;
        res = trial_res;
        if res.iter().any(|r| !r.is_finite()) {
            break;
        }
    }
    if inf_norm(&res[..m - 1]) <= BALANCE_TOL {
        converged = true;
    }
    if !converged {
        return Err(Error::EquilibriumNotConverged {
            residual: inf_norm(&res),
            iterations: NEWTON_MAX_ITER,
        });
    }
    let full = inf_norm(&res);
    if full > BALANCE_TOL {
        return Err(Error::PowerImbalance { residual: full });
    }
    Ok(delta.iter().map(|d| d + reference).collect())
}

/// Solves the equilibrium from a flat start and returns the analytic
/// quadratic model in relative-angle states.
pub fn build_swing_model(params: &SwingParams) -> Result<QuadraticModel> {
    let sys = SwingSystem::new(params.clone())?;
    let delta = solve_equilibrium(params, &vec![0.0; params.machines()])?;
    sys.quadratize(&sys.state_from_angles(&delta))
}
