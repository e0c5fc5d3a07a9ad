//! Numerical oracle: fixed-step RK4 integration, reconstruction-gap
//! measurement and DFT peak picking.
//!
//! The integrator only sees a [`VectorField`]; it shares nothing with the
//! normal-form reconstruction it is used to check.

use nalgebra::DMatrix;
use rustfft::num_complex::Complex;
use rustfft::FftPlanner;

use crate::error::{Error, Result};
use crate::modal::ModalBasis;
use crate::normalform::{invert_initial_condition, reconstruct_response, SecondOrderNF};
use crate::sysmodel::{QuadraticModel, VectorField};

/// Agreement required between the `dt` and `dt/2` runs before a warning is attached.
pub const SELF_CHECK_TOL: f64 = 1e-8;
pub const MIN_SPECTRAL_SAMPLES: usize = 256;
const PEAK_THRESHOLD: f64 = 0.05;

#[derive(Debug, Clone)]
pub struct Trajectory {
    pub times: Vec<f64>,
    /// `n x T`, column `j` is the state at `times[j]`.
    pub states: DMatrix<f64>,
    pub dt: f64,
    /// Max-norm difference against the half-step run, on the shared grid.
    pub self_check: f64,
    pub warnings: Vec<String>,
}

impl Trajectory {
    pub fn state_series(&self, k: usize) -> Vec<f64> {
        self.states.row(k).iter().copied().collect()
    }

    pub fn final_state(&self) -> Vec<f64> {
        self.states
            .column(self.times.len() - 1)
            .iter()
            .copied()
            .collect()
    }
}

fn rk4_run<F: VectorField + ?Sized>(
    f: &F,
    x0: &[f64],
    dt: f64,
    steps: usize,
) -> Result<Vec<Vec<f64>>> {
    let n = x0.len();
    let mut x = x0.to_vec();
    let mut out = Vec::with_capacity(steps + 1);
    out.push(x.clone());
    let (mut k1, mut k2, mut k3, mut k4) = (vec![0.0; n], vec![0.0; n], vec![0.0; n], vec![0.0; n]);
    let mut tmp = vec![0.0; n];
    for step in 0..steps {
        f.eval(&x, &mut k1);
        for j in 0..n {
            tmp[j] = x[j] + 0.5 * dt * k1[j];
        }
        f.eval(&tmp, &mut k2);
        for j in 0..n {
            tmp[j] = x[j] + 0.5 * dt * k2[j];
        }
        f.eval(&tmp, &mut k3);
        for j in 0..n {
            tmp[j] = x[j] + dt * k3[j];
        }
        f.eval(&tmp, &mut k4);
        for j in 0..n {
            x[j] += dt / 6.0 * (k1[j] + 2.0 * k2[j] + 2.0 * k3[j] + k4[j]);
        }
        if x.iter().any(|v| !v.is_finite()) {
            return Err(Error::Divergence {
                time: (step + 1) as f64 * dt,
            });
        }
        out.push(x.clone());
    }
    Ok(out)
}

/// Classical fixed-step RK4 from `t = 0` to `t_end`.
///
/// The step is adjusted down so that `t_end` is a whole number of steps.
/// A second run at half the step is compared on the shared grid; if the two
/// disagree by more than [`SELF_CHECK_TOL`] a warning is attached.
pub fn integrate<F: VectorField + ?Sized>(
    f: &F,
    x0: &[f64],
    dt: f64,
    t_end: f64,
) -> Result<Trajectory> {
    let n = f.dim();
    if x0.len() != n {
        return Err(Error::Dimension {
            what: "initial state",
            expected: n,
            found: x0.len(),
        });
    }
    if !(dt > 0.0 && dt.is_finite()) || !(t_end > 0.0 && t_end.is_finite()) {
        return Err(Error::InvalidInput(format!(
            "dt and t_end must be positive, got dt = {dt}, t_end = {t_end}"
        )));
    }
    let steps = (t_end / dt - 1e-9).ceil().max(1.0) as usize;
    let h = t_end / steps as f64;
    let coarse = rk4_run(f, x0, h, steps)?;
    let fine = rk4_run(f, x0, 0.5 * h, 2 * steps)?;
    let self_check = coarse
        .iter()
        .enumerate()
        .map(|(j, xc)| {
            xc.iter()
                .zip(&fine[2 * j])
                .map(|(a, b)| (a - b).abs())
                .fold(0.0, f64::max)
        })
        .fold(0.0, f64::max);
    let mut warnings = Vec::new();
    if self_check > SELF_CHECK_TOL {
        warnings.push(format!(
            "step-halving check: {self_check:.3e} exceeds {SELF_CHECK_TOL:.0e}; consider a smaller dt"
        ));
    }
    let times = (0..=steps).map(|j| j as f64 * h).collect();
    let states = DMatrix::from_fn(n, steps + 1, |k, j| coarse[j][k]);
    Ok(Trajectory {
        times,
        states,
        dt: h,
        self_check,
        warnings,
    })
}

#[derive(Debug, Clone)]
pub struct GapReport {
    pub max_gap: f64,
    pub times: Vec<f64>,
    /// Max-norm gap at each time.
    pub gap_curve: Vec<f64>,
    pub trajectory: Trajectory,
}

/// Max-norm gap between the normal-form reconstruction and direct
/// integration of the quadratic model, from deviation `x0`.
pub fn reconstruction_error(
    model: &QuadraticModel,
    basis: &ModalBasis,
    nf: &SecondOrderNF,
    x0: &[f64],
    dt: f64,
    t_end: f64,
) -> Result<GapReport> {
    let trajectory = integrate(model, x0, dt, t_end)?;
    let z0 = invert_initial_condition(basis, nf, x0)?;
    let rebuilt = reconstruct_response(basis, nf, &z0, &trajectory.times)?;
    let gap_curve: Vec<f64> = (0..trajectory.times.len())
        .map(|j| {
            (trajectory.states.column(j) - rebuilt.states.column(j))
                .iter()
                .fold(0.0_f64, |m, v| m.max(v.abs()))
        })
        .collect();
    let max_gap = gap_curve.iter().copied().fold(0.0, f64::max);
    Ok(GapReport {
        max_gap,
        times: trajectory.times.clone(),
        gap_curve,
        trajectory,
    })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SpectralPeak {
    pub freq_hz: f64,
    /// Magnitude relative to the largest peak.
    pub rel_amplitude: f64,
}

/// Local maxima of the Hann-windowed DFT magnitude of state `k` (mean
/// removed) that exceed 5% of the largest bin, strongest first.
///
/// Bin spacing is `1 / (N dt)`, i.e. one over the record length.
pub fn dominant_frequencies(traj: &Trajectory, k: usize) -> Result<Vec<SpectralPeak>> {
    if k >= traj.states.nrows() {
        return Err(Error::InvalidInput(format!(
            "state index {} out of range",
            k + 1
        )));
    }
    let len = traj.times.len();
    if len < MIN_SPECTRAL_SAMPLES {
        return Err(Error::TooShort {
            samples: len,
            required: MIN_SPECTRAL_SAMPLES,
        });
    }
    let series = traj.state_series(k);
    let mean = series.iter().sum::<f64>() / len as f64;
    let mut buf: Vec<Complex<f64>> = series
        .iter()
        .enumerate()
        .map(|(j, v)| {
            let w = 0.5 - 0.5 * (2.0 * std::f64::consts::PI * j as f64 / (len - 1) as f64).cos();
            Complex::new((v - mean) * w, 0.0)
        })
        .collect();
    FftPlanner::new().plan_fft_forward(len).process(&mut buf);

    let half = len / 2;
    let mags: Vec<f64> = buf[..=half].iter().map(|c| c.norm()).collect();
    let max = mags[1..].iter().copied().fold(0.0, f64::max);
    if max <= f64::EPSILON * len as f64 * series.iter().fold(0.0_f64, |m, v| m.max(v.abs()))
        || max == 0.0
    {
        return Ok(Vec::new());
    }
    let df = 1.0 / (len as f64 * traj.dt);
    let mut peaks: Vec<SpectralPeak> = (1..half)
        .filter(|&b| {
            mags[b] >= mags[b - 1] && mags[b] > mags[b + 1] && mags[b] >= PEAK_THRESHOLD * max
        })
        .map(|b| SpectralPeak {
            freq_hz: b as f64 * df,
            rel_amplitude: mags[b] / max,
        })
        .collect();
    peaks.sort_by(|a, b| b.rel_amplitude.total_cmp(&a.rel_amplitude));
    Ok(peaks)
}
