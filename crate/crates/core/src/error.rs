use num_complex::Complex64;
use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("x_eq is not an equilibrium: residual norm {residual:.3e}")]
    NotAtEquilibrium { residual: f64 },

    #[error("non-finite value: {0}")]
    NonFinite(String),

    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("dimension mismatch in {what}: expected {expected}, found {found}")]
    Dimension {
        what: &'static str,
        expected: usize,
        found: usize,
    },

    #[error("{path}: {message}")]
    Schema { path: String, message: String },

    #[error("equilibrium search did not converge after {iterations} iterations (residual {residual:.3e})")]
    EquilibriumNotConverged { residual: f64, iterations: usize },

    #[error("power balance cannot be met at the reference machine (mismatch {residual:.3e})")]
    PowerImbalance { residual: f64 },

    #[error("singular Jacobian in equilibrium search")]
    SingularJacobian,

    #[error("state matrix is defective or near-defective around eigenvalues {}", fmt_eigs(.eigenvalues))]
    Defective { eigenvalues: Vec<Complex64> },

    #[error("initial-condition inversion did not converge (last residual {residual:.3e})")]
    InversionNotConverged { residual: f64 },

    #[error("integration diverged at t = {time:.6}")]
    Divergence { time: f64 },

    #[error("set of initial-state scales is empty")]
    EmptyScaleSet,

    #[error("frequency bands overlap or are unordered: {0}")]
    OverlappingBands(String),

    #[error("cannot rank an all-zero vector")]
    AllZero,

    #[error(
        "trajectory too short for spectral analysis: {samples} samples (need at least {required})"
    )]
    TooShort { samples: usize, required: usize },
}

impl Error {
    /// True for errors caused by malformed or out-of-range user input, as
    /// opposed to numerical failures on well-formed input.
    pub fn is_input_error(&self) -> bool {
        matches!(
            self,
            Error::InvalidInput(_)
                | Error::Dimension { .. }
                | Error::Schema { .. }
                | Error::EmptyScaleSet
                | Error::OverlappingBands(_)
        )
    }
}

fn fmt_eigs(eigs: &[Complex64]) -> String {
    let parts: Vec<String> = eigs
        .iter()
        .map(|l| format!("{:.6e}{:+.6e}j", l.re, l.im))
        .collect();
    parts.join(", ")
}
