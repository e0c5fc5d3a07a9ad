//! System models: the quadratic (second-order Taylor) truncation of a
//! vector field, and the builders that produce one.

mod file;
mod finite_diff;
mod quadratic;
mod swing;

pub use file::{LoadedModel, ModelFile, QuadraticSpec, SwingSpec};
pub use finite_diff::{default_fd_step, quadratize_finite_diff, EQUILIBRIUM_TOL};
pub use quadratic::QuadraticModel;
pub use swing::{build_swing_model, solve_equilibrium, SwingParams, SwingSystem};

/// An autonomous vector field `x' = f(x)` on `R^n`.
pub trait VectorField {
    fn dim(&self) -> usize;

    /// Writes `f(x)` into `out`. Both slices have length `dim()`.
    fn eval(&self, x: &[f64], out: &mut [f64]);
}

/// Adapts a closure into a [`VectorField`].
pub struct FnField<F> {
    n: usize,
    f: F,
}

impl<F> FnField<F>
where
    F: Fn(&[f64], &mut [f64]),
{
    pub fn new(n: usize, f: F) -> Self {
        Self { n, f }
    }
}

impl<F> VectorField for FnField<F>
where
    F: Fn(&[f64], &mut [f64]),
{
    fn dim(&self) -> usize {
        self.n
    }

    fn eval(&self, x: &[f64], out: &mut [f64]) {
        (self.f)(x, out)
    }
}
