//! Eigendecomposition of the state matrix with bi-orthonormal left and
//! right eigenvectors, linear participation factors and contribution
//! factors.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use std::f64::consts::PI;

use crate::error::{Error, Result};

const BIORTHO_TOL: f64 = 1e-9;
const RECONSTRUCTION_TOL: f64 = 1e-8;
/// Eigenvalues closer than this (relative to `max(1, |A|_F)`) are treated as
/// one cluster whose eigenspace must have full dimension.
const CLUSTER_GAP: f64 = 1e-10;
const NULL_SPACE_TOL: f64 = 1e-8;

/// Modes of a real state matrix.
///
/// Right eigenvectors are the columns of `phi` (mode shapes), left
/// eigenvectors the rows of `psi` (mode compositions), with `psi = phi^-1`.
/// Modes are sorted by `|Im|` ascending then `Re` descending; a complex pair
/// occupies adjacent slots with the positive-frequency member first and the
/// second member built as the exact conjugate of the first.
#[derive(Debug, Clone)]
pub struct ModalBasis {
    lambdas: Vec<Complex64>,
    phi: DMatrix<Complex64>,
    psi: DMatrix<Complex64>,
    pair_of: Vec<usize>,
    freq_hz: Vec<f64>,
}

impl ModalBasis {
    pub fn n(&self) -> usize {
        self.lambdas.len()
    }

    pub fn lambdas(&self) -> &[Complex64] {
        &self.lambdas
    }

    pub fn lambda(&self, i: usize) -> Complex64 {
        self.lambdas[i]
    }

    /// Right eigenvectors as columns; `phi()[(k, i)]` is entry `k` of mode `i`.
    pub fn phi(&self) -> &DMatrix<Complex64> {
        &self.phi
    }

    /// Left eigenvectors as rows; `psi()[(i, k)]` is entry `k` of mode `i`.
    pub fn psi(&self) -> &DMatrix<Complex64> {
        &self.psi
    }

    /// Conjugate partner of mode `i` (itself for real modes).
    pub fn pair_of(&self, i: usize) -> usize {
        self.pair_of[i]
    }

    /// `|Im lambda_i| / 2 pi`.
    pub fn freq_hz(&self, i: usize) -> f64 {
        self.freq_hz[i]
    }

    pub fn is_real(&self, i: usize) -> bool {
        self.pair_of[i] == i
    }

    /// Real modes and the positive-frequency member of each complex pair.
    pub fn is_representative(&self, i: usize) -> bool {
        self.is_real(i) || self.lambdas[i].im > 0.0
    }

    pub fn representatives(&self) -> impl Iterator<Item = usize> + '_ {
        (0..self.n()).filter(move |&i| self.is_representative(i))
    }

    /// Positive-frequency modes only.
    pub fn oscillatory(&self) -> impl Iterator<Item = usize> + '_ {
        (0..self.n()).filter(move |&i| self.lambdas[i].im > 0.0)
    }

    /// `-Re(lambda) / |lambda|`; 1 for a zero eigenvalue.
    pub fn damping_ratio(&self, i: usize) -> f64 {
        let l = self.lambdas[i];
        let mag = l.norm();
        if mag == 0.0 {
            1.0
        } else {
            -l.re / mag
        }
    }

    /// Representative mode whose frequency is closest to `f_hz`.
    pub fn closest_mode(&self, f_hz: f64) -> Option<usize> {
        self.representatives().min_by(|&a, &b| {
            (self.freq_hz[a] - f_hz)
                .abs()
                .total_cmp(&(self.freq_hz[b] - f_hz).abs())
        })
    }
}

/// Diagonalizes a real matrix.
///
/// Fails with [`Error::Defective`] when an eigenvalue cluster lacks a full
/// set of eigenvectors or the eigenvector matrix is too ill-conditioned to
/// give `psi * phi = I` within `1e-9`.
pub fn decompose(a: &DMatrix<f64>) -> Result<ModalBasis> {
    let n = a.nrows();
    if n == 0 || a.ncols() != n {
        return Err(Error::Dimension {
            what: "state matrix",
            expected: n,
            found: a.ncols(),
        });
    }
    if a.iter().any(|v| !v.is_finite()) {
        return Err(Error::NonFinite("state matrix".into()));
    }
    let scale = a.norm().max(1.0);
    let gap = CLUSTER_GAP * scale;

    let eigs = a.complex_eigenvalues();
    if eigs.iter().any(|l| !l.re.is_finite() || !l.im.is_finite()) {
        return Err(Error::NonFinite("eigenvalues".into()));
    }

    // Representatives: real eigenvalues, and the upper member of each pair.
    // A pair whose members are closer than the cluster gap is a double real
    // eigenvalue in disguise.
    let mut reps: Vec<Complex64> = Vec::with_capacity(n);
    let mut n_lower = 0usize;
    for l in eigs.iter() {
        if l.im.abs() * 2.0 <= gap {
            reps.push(Complex64::new(l.re, 0.0));
        } else if l.im > 0.0 {
            reps.push(*l);
        } else {
            n_lower += 1;
        }
    }
    let n_upper = reps.iter().filter(|l| l.im > 0.0).count();
    if n_upper != n_lower {
        return Err(Error::Defective {
            eigenvalues: eigs.iter().copied().collect(),
        });
    }
    reps.sort_by(|x, y| {
        x.im.abs()
            .total_cmp(&y.im.abs())
            .then(y.re.total_cmp(&x.re))
    });

    // Group representatives into clusters of numerically coincident values.
    let mut cluster_of = vec![usize::MAX; reps.len()];
    let mut clusters: Vec<Vec<usize>> = Vec::new();
    for i in 0..reps.len() {
        if cluster_of[i] != usize::MAX {
            continue;
        }
        let id = clusters.len();
        let mut members = vec![i];
        cluster_of[i] = id;
        for j in (i + 1)..reps.len() {
            if cluster_of[j] == usize::MAX
                && reps[j].im.signum() == reps[i].im.signum()
                && members.iter().any(|&m| (reps[m] - reps[j]).norm() <= gap)
            {
                cluster_of[j] = id;
                members.push(j);
            }
        }
        clusters.push(members);
    }

    let mut rep_vectors: Vec<Option<DVector<Complex64>>> = vec![None; reps.len()];
    for members in &clusters {
        let mean = members.iter().map(|&m| reps[m]).sum::<Complex64>() / members.len() as f64;
        let vectors =
            null_vectors(a, mean, members.len(), scale).ok_or_else(|| Error::Defective {
                eigenvalues: members.iter().map(|&m| reps[m]).collect(),
            })?;
        for (&m, v) in members.iter().zip(vectors) {
            rep_vectors[m] = Some(normalize_peak(v));
        }
    }

    let mut lambdas = Vec::with_capacity(n);
    let mut columns: Vec<DVector<Complex64>> = Vec::with_capacity(n);
    let mut pair_of = Vec::with_capacity(n);
    for (r, v) in reps.iter().zip(rep_vectors) {
        let v = v.expect("every representative has a vector");
        let idx = lambdas.len();
        if r.im > 0.0 {
            lambdas.push(*r);
            lambdas.push(r.conj());
            columns.push(v.clone());
            columns.push(v.map(|c| c.conj()));
            pair_of.push(idx + 1);
            pair_of.push(idx);
        } else {
            lambdas.push(*r);
            columns.push(v);
            pair_of.push(idx);
        }
    }
    let phi = DMatrix::from_columns(&columns);
    let psi = phi.clone().try_inverse().ok_or_else(|| Error::Defective {
        eigenvalues: lambdas.clone(),
    })?;

    let ident_gap = (&psi * &phi - DMatrix::<Complex64>::identity(n, n))
        .iter()
        .map(|c| c.norm())
        .fold(0.0, f64::max);
    if !(ident_gap <= BIORTHO_TOL) {
        return Err(Error::Defective {
            eigenvalues: closest_pair(&lambdas),
        });
    }
    let lambda_diag = DMatrix::from_diagonal(&DVector::from_vec(lambdas.clone()));
    let rebuilt = &phi * lambda_diag * &psi;
    let a_c = a.map(|v| Complex64::new(v, 0.0));
    let rel = (rebuilt - &a_c).norm() / a.norm().max(f64::MIN_POSITIVE);
    if !(rel <= RECONSTRUCTION_TOL || (a.norm() == 0.0 && rel == 0.0)) {
        return Err(Error::Defective {
            eigenvalues: closest_pair(&lambdas),
        });
    }

    let freq_hz = lambdas.iter().map(|l| l.im.abs() / (2.0 * PI)).collect();
    Ok(ModalBasis {
        lambdas,
        phi,
        psi,
        pair_of,
        freq_hz,
    })
}

/// `count` orthonormal vectors spanning the numerical null space of
/// `A - lambda I`, or `None` when that space is smaller than `count`.
fn null_vectors(
    a: &DMatrix<f64>,
    lambda: Complex64,
    count: usize,
    scale: f64,
) -> Option<Vec<DVector<Complex64>>> {
    let n = a.nrows();
    let tol = NULL_SPACE_TOL * scale;
    let (sv, rows): (Vec<f64>, Vec<DVector<Complex64>>) = if lambda.im == 0.0 {
        let shifted = a - DMatrix::<f64>::identity(n, n) * lambda.re;
        let svd = shifted.svd(false, true);
        let vt = svd.v_t?;
        (
            svd.singular_values.iter().copied().collect(),
            (0..n)
                .map(|r| DVector::from_fn(n, |k, _| Complex64::new(vt[(r, k)], 0.0)))
                .collect(),
        )
    } else {
        let shifted =
            a.map(|v| Complex64::new(v, 0.0)) - DMatrix::<Complex64>::identity(n, n) * lambda;
        let svd = shifted.svd(false, true);
        let vt = svd.v_t?;
        (
            svd.singular_values.iter().copied().collect(),
            (0..n)
                .map(|r| DVector::from_fn(n, |k, _| vt[(r, k)].conj()))
                .collect(),
        )
    };
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&x, &y| sv[x].total_cmp(&sv[y]));
    if sv[order[count - 1]] > tol {
        return None;
    }
    Some(order[..count].iter().map(|&r| rows[r].clone()).collect())
}

/// Scales `v` so that its first largest-magnitude entry equals `1 + 0j`.
fn normalize_peak(v: DVector<Complex64>) -> DVector<Complex64> {
    let mut best = 0;
    for (k, c) in v.iter().enumerate() {
        if c.norm() > v[best].norm() * (1.0 + 1e-12) {
            best = k;
        }
    }
    let pivot = v[best];
    let mut out = v.map(|c| c / pivot);
    out[best] = Complex64::new(1.0, 0.0);
    out
}

fn closest_pair(lambdas: &[Complex64]) -> Vec<Complex64> {
    let mut best = (f64::INFINITY, 0, 0);
    for i in 0..lambdas.len() {
        for j in (i + 1)..lambdas.len() {
            let d = (lambdas[i] - lambdas[j]).norm();
            if d < best.0 {
                best = (d, i, j);
            }
        }
    }
    if best.0.is_finite() {
        vec![lambdas[best.1], lambdas[best.2]]
    } else {
        lambdas.to_vec()
    }
}

/// Linear participation factors `p[(k, i)] = phi_ki psi_ik`.
pub fn linear_pf(basis: &ModalBasis) -> DMatrix<Complex64> {
    let n = basis.n();
    DMatrix::from_fn(n, n, |k, i| basis.phi[(k, i)] * basis.psi[(i, k)])
}

/// Contribution factors `B[(k, i)] = (psi_i . x0) phi_ki`.
pub fn contribution_factors(basis: &ModalBasis, x0: &[f64]) -> Result<DMatrix<Complex64>> {
    let n = basis.n();
    if x0.len() != n {
        return Err(Error::Dimension {
            what: "initial state",
            expected: n,
            found: x0.len(),
        });
    }
    let amplitudes: Vec<Complex64> = (0..n)
        .map(|i| (0..n).map(|k| basis.psi[(i, k)] * x0[k]).sum())
        .collect();
    Ok(DMatrix::from_fn(n, n, |k, i| {
        amplitudes[i] * basis.phi[(k, i)]
    }))
}

/// `x_k(t) = sum_i B[(k, i)] exp(lambda_i t)`, returned with the residual
/// imaginary part kept so callers can check it.
pub fn modal_sum(basis: &ModalBasis, b: &DMatrix<Complex64>, t: f64) -> Vec<Complex64> {
    let growth: Vec<Complex64> = basis.lambdas.iter().map(|l| (l * t).exp()).collect();
    (0..basis.n())
        .map(|k| (0..basis.n()).map(|i| b[(k, i)] * growth[i]).sum())
        .collect()
}
