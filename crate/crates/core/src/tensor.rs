use num_complex::Complex64;
use serde::{Deserialize, Serialize};

/// Dense cubic tensor `T[i][p][q]` of complex coefficients.
///
/// Used for the modal quadratic coefficients and the normal-form
/// coefficients; both are kept symmetric in `(p, q)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Tensor3 {
    n: usize,
    data: Vec<Complex64>,
}

impl Tensor3 {
    pub fn zeros(n: usize) -> Self {
        Self {
            n,
            data: vec![Complex64::new(0.0, 0.0); n * n * n],
        }
    }

    /// Builds a tensor from one `n x n` slice per leading index.
    pub fn from_slices(n: usize, slices: Vec<Vec<Complex64>>) -> Self {
        assert_eq!(slices.len(), n);
        let mut data = Vec::with_capacity(n * n * n);
        for s in slices {
            assert_eq!(s.len(), n * n);
            data.extend(s);
        }
        Self { n, data }
    }

    #[inline]
    pub fn dim(&self) -> usize {
        self.n
    }

    #[inline]
    fn offset(&self, i: usize, p: usize, q: usize) -> usize {
        (i * self.n + p) * self.n + q
    }

    #[inline]
    pub fn get(&self, i: usize, p: usize, q: usize) -> Complex64 {
        self.data[self.offset(i, p, q)]
    }

    #[inline]
    pub fn set(&mut self, i: usize, p: usize, q: usize, v: Complex64) {
        let o = self.offset(i, p, q);
        self.data[o] = v;
    }

    /// The `n x n` block for leading index `i`, row-major in `(p, q)`.
    pub fn slice(&self, i: usize) -> &[Complex64] {
        let nn = self.n * self.n;
        &self.data[i * nn..(i + 1) * nn]
    }

    /// `sum_{p,q} T[i][p][q] u_p v_q` over all ordered pairs.
    pub fn bilinear(&self, i: usize, u: &[Complex64], v: &[Complex64]) -> Complex64 {
        let block = self.slice(i);
        let mut acc = Complex64::new(0.0, 0.0);
        for p in 0..self.n {
            let row = &block[p * self.n..(p + 1) * self.n];
            let mut inner = Complex64::new(0.0, 0.0);
            for q in 0..self.n {
                inner += row[q] * v[q];
            }
            acc += u[p] * inner;
        }
        acc
    }

    pub fn iter(&self) -> impl Iterator<Item = &Complex64> {
        self.data.iter()
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(|c| c.re == 0.0 && c.im == 0.0)
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().map(|c| c.norm()).fold(0.0, f64::max)
    }

    /// Replaces every `(p, q)` pair by the mean of `T[i][p][q]` and `T[i][q][p]`.
    pub fn symmetrize(&mut self) {
        let n = self.n;
        for i in 0..n {
            for p in 0..n {
                for q in (p + 1)..n {
                    let avg = (self.get(i, p, q) + self.get(i, q, p)) * 0.5;
                    self.set(i, p, q, avg);
                    self.set(i, q, p, avg);
                }
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64) -> Complex64 {
        Complex64::new(re, 0.0)
    }

    #[test]
    fn bilinear_matches_explicit_sum() {
        let mut t = Tensor3::zeros(2);
        t.set(0, 0, 1, c(2.0));
        t.set(0, 1, 0, c(4.0));
        t.set(1, 1, 1, c(-1.0));
        let u = [c(1.0), c(3.0)];
        let v = [c(5.0), c(7.0)];
        // 2*u0*v1 + 4*u1*v0
        assert_eq!(t.bilinear(0, &u, &v), c(2.0 * 7.0 + 4.0 * 15.0));
        assert_eq!(t.bilinear(1, &u, &v), c(-21.0));
    }

    #[test]
    fn symmetrize_averages_off_diagonal() {
        let mut t = Tensor3::zeros(2);
        t.set(1, 0, 1, c(2.0));
        t.symmetrize();
        assert_eq!(t.get(1, 0, 1), c(1.0));
        assert_eq!(t.get(1, 1, 0), c(1.0));
        assert!(!t.is_zero());
    }
}
