use nalgebra::{DMatrix, DVector};
use std::collections::HashSet;

use super::VectorField;
use crate::error::{Error, Result};

/// Second-order truncation `x' = A x + 1/2 [x^T H_k x]_k` of a vector field
/// around its equilibrium `x_eq`. The state `x` is the deviation from `x_eq`.
#[derive(Debug, Clone)]
pub struct QuadraticModel {
    a: DMatrix<f64>,
    h: Vec<DMatrix<f64>>,
    x_eq: DVector<f64>,
    labels: Vec<String>,
}

impl QuadraticModel {
    /// Validates dimensions and finiteness, and symmetrizes every Hessian.
    pub fn new(
        a: DMatrix<f64>,
        mut h: Vec<DMatrix<f64>>,
        x_eq: DVector<f64>,
        labels: Vec<String>,
    ) -> Result<Self> {
        let n = a.nrows();
        if n == 0 {
            return Err(Error::InvalidInput(
                "state dimension must be positive".into(),
            ));
        }
        if a.ncols() != n {
            return Err(Error::Dimension {
                what: "A columns",
                expected: n,
                found: a.ncols(),
            });
        }
        if h.len() != n {
            return Err(Error::Dimension {
                what: "number of Hessians",
                expected: n,
                found: h.len(),
            });
        }
        for hk in &h {
            if hk.nrows() != n || hk.ncols() != n {
                return Err(Error::Dimension {
                    what: "Hessian size",
                    expected: n,
                    found: hk.nrows().max(hk.ncols()),
                });
            }
        }
        if x_eq.len() != n {
            return Err(Error::Dimension {
                what: "x_eq",
                expected: n,
                found: x_eq.len(),
            });
        }
        if labels.len() != n {
            return Err(Error::Dimension {
                what: "labels",
                expected: n,
                found: labels.len(),
            });
        }
        let mut seen = HashSet::new();
        for l in &labels {
            if !seen.insert(l.as_str()) {
                return Err(Error::InvalidInput(format!("duplicate state label {l:?}")));
            }
        }
        let finite = a.iter().all(|v| v.is_finite())
            && h.iter().all(|m| m.iter().all(|v| v.is_finite()))
            && x_eq.iter().all(|v| v.is_finite());
        if !finite {
            return Err(Error::NonFinite("model coefficients".into()));
        }
        for hk in h.iter_mut() {
            let sym = (&*hk + hk.transpose()) * 0.5;
            *hk = sym;
        }
        Ok(Self { a, h, x_eq, labels })
    }

    /// Linear model with zero Hessians at the origin.
    pub fn linear(a: DMatrix<f64>) -> Result<Self> {
        let n = a.nrows();
        Self::new(
            a,
            vec![DMatrix::zeros(n, n); n],
            DVector::zeros(n),
            default_labels(n),
        )
    }

    pub fn n(&self) -> usize {
        self.a.nrows()
    }

    pub fn a(&self) -> &DMatrix<f64> {
        &self.a
    }

    pub fn hessians(&self) -> &[DMatrix<f64>] {
        &self.h
    }

    pub fn hessian(&self, k: usize) -> &DMatrix<f64> {
        &self.h[k]
    }

    pub fn x_eq(&self) -> &DVector<f64> {
        &self.x_eq
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn is_linear(&self) -> bool {
        self.h.iter().all(|m| m.iter().all(|v| *v == 0.0))
    }

    /// Same coefficients with all second-order terms dropped.
    pub fn linearized(&self) -> Self {
        let n = self.n();
        Self {
            a: self.a.clone(),
            h: vec![DMatrix::zeros(n, n); n],
            x_eq: self.x_eq.clone(),
            labels: self.labels.clone(),
        }
    }
}

impl VectorField for QuadraticModel {
    fn dim(&self) -> usize {
        self.n()
    }

    fn eval(&self, x: &[f64], out: &mut [f64]) {
        let n = self.n();
        for k in 0..n {
            let mut lin = 0.0;
            for j in 0..n {
                lin += self.a[(k, j)] * x[j];
            }
            let hk = &self.h[k];
            let mut quad = 0.0;
            for i in 0..n {
                if x[i] == 0.0 {
                    continue;
                }
                let mut row = 0.0;
                for j in 0..n {
                    row += hk[(i, j)] * x[j];
                }
                quad += x[i] * row;
            }
            out[k] = lin + 0.5 * quad;
        }
    }
}

pub(crate) fn default_labels(n: usize) -> Vec<String> {
    (1..=n).map(|i| format!("x{i}")).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn hessians_are_symmetrized() {
        let a = DMatrix::from_row_slice(2, 2, &[-1.0, 0.0, 0.0, -2.0]);
        let h0 = DMatrix::from_row_slice(2, 2, &[0.0, 2.0, 0.0, 0.0]);
        let m = QuadraticModel::new(
            a,
            vec![h0, DMatrix::zeros(2, 2)],
            DVector::zeros(2),
            default_labels(2),
        )
        .unwrap();
        assert_eq!(m.hessian(0)[(0, 1)], 1.0);
        assert_eq!(m.hessian(0)[(1, 0)], 1.0);
    }

    #[test]
    fn rejects_duplicate_labels_and_nan() {
        let a = DMatrix::<f64>::identity(2, 2);
        let h = vec![DMatrix::zeros(2, 2); 2];
        let err = QuadraticModel::new(
            a.clone(),
            h.clone(),
            DVector::zeros(2),
            vec!["a".into(), "a".into()],
        );
        assert!(matches!(err, Err(Error::InvalidInput(_))));
        let mut bad = a;
        bad[(0, 0)] = f64::NAN;
        let err = QuadraticModel::new(bad, h, DVector::zeros(2), default_labels(2));
        assert!(matches!(err, Err(Error::NonFinite(_))));
    }

    #[test]
    fn eval_at_origin_is_zero() {
        let a = DMatrix::from_row_slice(2, 2, &[-1.0, 0.5, 0.2, -2.0]);
        let h = vec![DMatrix::from_element(2, 2, 0.3); 2];
        let m = QuadraticModel::new(a, h, DVector::zeros(2), default_labels(2)).unwrap();
        let mut out = [1.0; 2];
        m.eval(&[0.0, 0.0], &mut out);
        assert_eq!(out, [0.0, 0.0]);
        m.eval(&[1.0, 2.0], &mut out);
        // 0.5 * 0.3 * (1+2)^2 = 1.35
        assert!((out[0] - (0.0 + 1.35)).abs() < 1e-14);
    }
}
