//! Nonlinear, extended and time-variant participation factors, the
//! participation spectrum over linear and resonance modes, and its Gaussian
//! convolution into nonlinear modes.
//!
//! For state `k` perturbed alone with amplitude `alpha_k`, the normal-form
//! initial state is
//!
//! ```text
//! z_i0 = alpha_k psi_ik + alpha_k^2 psi2_ik,   psi2_ik = -sum_{p,q} h2[i][p][q] psi_pk psi_qk
//! ```
//!
//! and the response splits into linear-mode terms `phi_ki z_i0 e^{lambda_i t}`
//! and resonance terms `phi_kpq z_p0 z_q0 e^{(lambda_p + lambda_q) t}` with the
//! pair shape `phi_kpq = sum_i h2[i][p][q] phi_ki`.

use nalgebra::DMatrix;
use num_complex::Complex64;
use serde::Serialize;
use std::f64::consts::PI;

use crate::error::{Error, Result};
use crate::modal::{linear_pf, ModalBasis};
use crate::normalform::SecondOrderNF;

pub const DEFAULT_SIGMA_HZ: f64 = 0.1;

/// Unordered mode pairs `(p, q)` with `p <= q`, in lexicographic order.
pub fn mode_pairs(n: usize) -> Vec<(usize, usize)> {
    (0..n).flat_map(|p| (p..n).map(move |q| (p, q))).collect()
}

/// Number of ordered pairs an unordered pair stands for.
#[inline]
fn multiplicity(p: usize, q: usize) -> f64 {
    if p == q {
        1.0
    } else {
        2.0
    }
}

/// `phi_kpq = sum_i h2[i][p][q] phi_ki`.
pub fn pair_shape(
    basis: &ModalBasis,
    nf: &SecondOrderNF,
    k: usize,
    p: usize,
    q: usize,
) -> Complex64 {
    let phi = basis.phi();
    (0..basis.n())
        .map(|i| nf.h2().get(i, p, q) * phi[(k, i)])
        .sum()
}

/// `psi2[(m, k)] = -sum_{p,q} h2[m][p][q] psi_pk psi_qk`.
pub fn second_order_left(basis: &ModalBasis, nf: &SecondOrderNF) -> DMatrix<Complex64> {
    let n = basis.n();
    let psi = basis.psi();
    let mut out = DMatrix::zeros(n, n);
    for k in 0..n {
        let col: Vec<Complex64> = (0..n).map(|p| psi[(p, k)]).collect();
        for m in 0..n {
            out[(m, k)] = -nf.h2().bilinear(m, &col, &col);
        }
    }
    out
}

fn check_alpha(alpha: &[f64], n: usize) -> Result<()> {
    if alpha.len() != n {
        return Err(Error::Dimension {
            what: "alpha",
            expected: n,
            found: alpha.len(),
        });
    }
    if let Some(a) = alpha.iter().find(|a| !(**a > 0.0 && a.is_finite())) {
        return Err(Error::InvalidInput(format!(
            "alpha entries must be positive, got {a}"
        )));
    }
    Ok(())
}

fn check_state(k: usize, n: usize) -> Result<()> {
    if k >= n {
        return Err(Error::InvalidInput(format!(
            "state index {} out of range 1..={n}",
            k + 1
        )));
    }
    Ok(())
}

/// Participation values for every `(state, mode)` and `(state, mode pair)`.
#[derive(Debug, Clone)]
pub struct ParticipationSet {
    alpha: Vec<f64>,
    p_lin: DMatrix<Complex64>,
    p2: DMatrix<Complex64>,
    p2nl: DMatrix<Complex64>,
    pairs: Vec<(usize, usize)>,
    p2res: DMatrix<Complex64>,
    psi2: DMatrix<Complex64>,
}

impl ParticipationSet {
    pub fn alpha(&self) -> &[f64] {
        &self.alpha
    }

    /// Linear PF, `[(k, i)]`.
    pub fn linear(&self) -> &DMatrix<Complex64> {
        &self.p_lin
    }

    /// Nonlinear PF, `[(k, i)]`.
    pub fn nonlinear(&self) -> &DMatrix<Complex64> {
        &self.p2
    }

    /// `nonlinear - linear`.
    pub fn nonlinear_extra(&self) -> &DMatrix<Complex64> {
        &self.p2nl
    }

    /// Resonance PF, `[(k, j)]` for `pairs()[j]`.
    pub fn resonance(&self) -> &DMatrix<Complex64> {
        &self.p2res
    }

    pub fn pairs(&self) -> &[(usize, usize)] {
        &self.pairs
    }

    pub fn pair_index(&self, p: usize, q: usize) -> usize {
        let (p, q) = if p <= q { (p, q) } else { (q, p) };
        let n = self.p_lin.nrows();
        // rows 0..p hold n, n-1, .., n-p+1 pairs each
        p * n - p * (p.saturating_sub(1)) / 2 + (q - p)
    }

    /// Second-order left-vector correction `[(m, k)]`.
    pub fn psi2(&self) -> &DMatrix<Complex64> {
        &self.psi2
    }

    /// `|linear[(., i)]|` divided by its maximum over states.
    pub fn normalized_linear(&self, i: usize) -> Vec<f64> {
        normalized_magnitudes(&column(&self.p_lin, i))
    }

    pub fn normalized_nonlinear(&self, i: usize) -> Vec<f64> {
        normalized_magnitudes(&column(&self.p2, i))
    }
}

fn column(m: &DMatrix<Complex64>, i: usize) -> Vec<Complex64> {
    m.column(i).iter().copied().collect()
}

/// Magnitudes scaled so the largest equals 1; all zeros stay zero.
pub fn normalized_magnitudes(values: &[Complex64]) -> Vec<f64> {
    let mags: Vec<f64> = values.iter().map(|v| v.norm()).collect();
    let max = mags.iter().copied().fold(0.0, f64::max);
    if max == 0.0 {
        return mags;
    }
    mags.into_iter().map(|m| m / max).collect()
}

/// Nonlinear participation factors for single-state perturbations
/// `x0 = alpha_k e_k`. With every `alpha_k = 1` this is the classical
/// second-order nonlinear PF.
pub fn nonlinear_pf(
    basis: &ModalBasis,
    nf: &SecondOrderNF,
    alpha: &[f64],
) -> Result<ParticipationSet> {
    let n = basis.n();
    check_alpha(alpha, n)?;
    let phi = basis.phi();
    let psi = basis.psi();
    let p_lin = linear_pf(basis);
    let psi2 = second_order_left(basis, nf);
    let pairs = mode_pairs(n);

    let mut p2 = DMatrix::zeros(n, n);
    let mut p2res = DMatrix::zeros(n, pairs.len());
    let shapes: Vec<Vec<Complex64>> = (0..n)
        .map(|k| {
            pairs
                .iter()
                .map(|&(p, q)| pair_shape(basis, nf, k, p, q))
                .collect()
        })
        .collect();
    for k in 0..n {
        let a = alpha[k];
        let z0: Vec<Complex64> = (0..n)
            .map(|i| psi[(i, k)] * a + psi2[(i, k)] * (a * a))
            .collect();
        for i in 0..n {
            p2[(k, i)] = phi[(k, i)] * z0[i];
        }
        for (j, &(p, q)) in pairs.iter().enumerate() {
            p2res[(k, j)] = shapes[k][j] * z0[p] * z0[q] * multiplicity(p, q);
        }
    }
    let p2nl = &p2 - &p_lin;
    Ok(ParticipationSet {
        alpha: alpha.to_vec(),
        p_lin,
        p2,
        p2nl,
        pairs,
        p2res,
        psi2,
    })
}

/// Linear-mode TNPF terms `P2ki(t)` for state `k` with scale `alpha_k`.
fn linear_mode_terms(
    basis: &ModalBasis,
    nf: &SecondOrderNF,
    k: usize,
    a: f64,
    t: f64,
) -> Vec<Complex64> {
    let n = basis.n();
    let phi = basis.phi();
    let psi = basis.psi();
    let lambdas = basis.lambdas();
    let decayed: Vec<Complex64> = (0..n)
        .map(|p| psi[(p, k)] * (lambdas[p] * t).exp())
        .collect();
    (0..n)
        .map(|i| {
            let linear = psi[(i, k)] * (lambdas[i] * t).exp() * a;
            let correction = -nf.h2().bilinear(i, &decayed, &decayed) * (a * a);
            phi[(k, i)] * (linear + correction)
        })
        .collect()
}

/// Average of `P2ki(t; alpha) / alpha` over a set of excitation scales.
pub fn extended_pf(
    basis: &ModalBasis,
    nf: &SecondOrderNF,
    k: usize,
    scales: &[f64],
    t: f64,
) -> Result<Vec<Complex64>> {
    let n = basis.n();
    check_state(k, n)?;
    if scales.is_empty() {
        return Err(Error::EmptyScaleSet);
    }
    if let Some(a) = scales.iter().find(|a| !(**a > 0.0 && a.is_finite())) {
        return Err(Error::InvalidInput(format!(
            "scales must be positive, got {a}"
        )));
    }
    let mut acc = vec![Complex64::new(0.0, 0.0); n];
    for &a in scales {
        for (sum, v) in acc.iter_mut().zip(linear_mode_terms(basis, nf, k, a, t)) {
            *sum += v / a;
        }
    }
    let count = scales.len() as f64;
    Ok(acc.into_iter().map(|v| v / count).collect())
}

#[derive(Debug, Clone, PartialEq)]
pub struct TnpfConfig {
    /// Per-state excitation scale.
    pub alpha: Vec<f64>,
    /// Gaussian kernel width (Hz).
    pub sigma_hz: f64,
    /// Evaluation times (s).
    pub time_grid: Vec<f64>,
    /// Keep 0 Hz resonance points when aggregating at a target frequency.
    pub include_dc: bool,
}

impl TnpfConfig {
    pub fn new(n: usize) -> Self {
        Self {
            alpha: vec![1.0; n],
            sigma_hz: DEFAULT_SIGMA_HZ,
            time_grid: vec![0.0],
            include_dc: false,
        }
    }

    pub fn validate(&self, n: usize) -> Result<()> {
        check_alpha(&self.alpha, n)?;
        if !(self.sigma_hz > 0.0 && self.sigma_hz.is_finite()) {
            return Err(Error::InvalidInput(format!(
                "sigma must be positive, got {}",
                self.sigma_hz
            )));
        }
        if let Some(t) = self
            .time_grid
            .iter()
            .find(|t| !(**t >= 0.0 && t.is_finite()))
        {
            return Err(Error::InvalidInput(format!(
                "times must be nonnegative, got {t}"
            )));
        }
        Ok(())
    }
}

/// Time-variant participation terms of one state.
#[derive(Debug, Clone)]
pub struct TnpfTerms {
    /// `P2ki(t)` per mode `i`.
    pub linear: Vec<Complex64>,
    /// `P2kpq(t)` per unordered pair, in [`mode_pairs`] order.
    pub resonance: Vec<Complex64>,
}

/// `P2ki(t)` and `P2kpq(t)` for state `k`.
///
/// Both terms carry the natural decay of their modes; the resonance term
/// keeps the `t = 0` nonlinear amplitude and decays at `lambda_p + lambda_q`.
pub fn tnpf_terms(
    basis: &ModalBasis,
    nf: &SecondOrderNF,
    alpha: &[f64],
    k: usize,
    t: f64,
) -> Result<TnpfTerms> {
    let n = basis.n();
    check_alpha(alpha, n)?;
    check_state(k, n)?;
    if !(t >= 0.0) {
        return Err(Error::InvalidInput(format!(
            "time must be nonnegative, got {t}"
        )));
    }
    let a = alpha[k];
    let linear = linear_mode_terms(basis, nf, k, a, t);

    let psi = basis.psi();
    let psi2 = second_order_left(basis, nf);
    let lambdas = basis.lambdas();
    let z0: Vec<Complex64> = (0..n)
        .map(|i| psi[(i, k)] * a + psi2[(i, k)] * (a * a))
        .collect();
    let resonance = mode_pairs(n)
        .into_iter()
        .map(|(p, q)| {
            pair_shape(basis, nf, k, p, q)
                * z0[p]
                * z0[q]
                * multiplicity(p, q)
                * ((lambdas[p] + lambdas[q]) * t).exp()
        })
        .collect();
    Ok(TnpfTerms { linear, resonance })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum PointKind {
    Linear,
    Resonance,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum PointSource {
    Mode(usize),
    Pair(usize, usize),
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SpectrumPoint {
    pub freq_hz: f64,
    pub amplitude: Complex64,
    pub kind: PointKind,
    pub source: PointSource,
}

/// Participation amplitudes of one state over linear and resonance modes.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PfSpectrum {
    pub state: usize,
    pub time: f64,
    pub points: Vec<SpectrumPoint>,
}

impl PfSpectrum {
    /// Copy without the 0 Hz resonance points.
    pub fn without_dc_resonances(&self) -> Self {
        Self {
            state: self.state,
            time: self.time,
            points: self
                .points
                .iter()
                .filter(|pt| !(pt.kind == PointKind::Resonance && pt.freq_hz == 0.0))
                .copied()
                .collect(),
        }
    }

    pub fn linear_points(&self) -> impl Iterator<Item = &SpectrumPoint> {
        self.points.iter().filter(|p| p.kind == PointKind::Linear)
    }

    pub fn resonance_points(&self) -> impl Iterator<Item = &SpectrumPoint> {
        self.points
            .iter()
            .filter(|p| p.kind == PointKind::Resonance)
    }
}

/// Whether pair `(p, q)` represents its conjugate class `{(p, q), (p*, q*)}`.
fn is_pair_representative(basis: &ModalBasis, p: usize, q: usize) -> bool {
    let s = basis.lambda(p) + basis.lambda(q);
    if s.im > 0.0 {
        return true;
    }
    if s.im < 0.0 {
        return false;
    }
    let (cp, cq) = (basis.pair_of(p), basis.pair_of(q));
    let conj = if cp <= cq { (cp, cq) } else { (cq, cp) };
    (p, q) <= conj
}

/// Participation spectrum of state `k` at time `t`.
///
/// One linear point per real mode or positive-frequency mode, at
/// `|Im lambda_i| / 2 pi`; one resonance point per conjugate class of mode
/// pairs, at `|Im(lambda_p + lambda_q)| / 2 pi`.
pub fn pf_spectrum(
    basis: &ModalBasis,
    nf: &SecondOrderNF,
    config: &TnpfConfig,
    k: usize,
    t: f64,
) -> Result<PfSpectrum> {
    let terms = tnpf_terms(basis, nf, &config.alpha, k, t)?;
    let mut points = Vec::new();
    for i in basis.representatives() {
        points.push(SpectrumPoint {
            freq_hz: basis.freq_hz(i),
            amplitude: terms.linear[i],
            kind: PointKind::Linear,
            source: PointSource::Mode(i),
        });
    }
    for (j, (p, q)) in mode_pairs(basis.n()).into_iter().enumerate() {
        if !is_pair_representative(basis, p, q) {
            continue;
        }
        let s = basis.lambda(p) + basis.lambda(q);
        points.push(SpectrumPoint {
            freq_hz: s.im.abs() / (2.0 * PI),
            amplitude: terms.resonance[j],
            kind: PointKind::Resonance,
            source: PointSource::Pair(p, q),
        });
    }
    Ok(PfSpectrum {
        state: k,
        time: t,
        points,
    })
}

/// Unit-peak Gaussian weight `exp(-d^2 / (2 sigma^2))`.
#[inline]
pub fn kernel(delta_hz: f64, sigma_hz: f64) -> f64 {
    (-(delta_hz * delta_hz) / (2.0 * sigma_hz * sigma_hz)).exp()
}

/// Gaussian-weighted sum of spectrum amplitudes around `f_target`.
///
/// # Panics
/// If `sigma_hz` is not positive.
pub fn convolve_at(spectrum: &PfSpectrum, f_target: f64, sigma_hz: f64) -> Complex64 {
    assert!(sigma_hz > 0.0, "sigma must be positive");
    spectrum
        .points
        .iter()
        .map(|pt| pt.amplitude * kernel(f_target - pt.freq_hz, sigma_hz))
        .sum()
}

/// Half-open frequency band `(lower, upper]` in Hz.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Band {
    pub lower: f64,
    pub upper: f64,
}

impl Band {
    pub fn new(lower: f64, upper: f64) -> Self {
        Self { lower, upper }
    }

    pub fn center(&self) -> f64 {
        0.5 * (self.lower + self.upper)
    }

    pub fn contains(&self, f: f64) -> bool {
        f > self.lower && f <= self.upper
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct NonlinearMode {
    pub band: Band,
    pub value: Complex64,
    /// Indices into the spectrum's points.
    pub members: Vec<usize>,
}

/// Sum of the spectrum points inside each band, weighted by the Gaussian
/// kernel centred on the band midpoint.
pub fn nonlinear_modes(
    spectrum: &PfSpectrum,
    bands: &[Band],
    sigma_hz: f64,
) -> Result<Vec<NonlinearMode>> {
    if !(sigma_hz > 0.0) {
        return Err(Error::InvalidInput(format!(
            "sigma must be positive, got {sigma_hz}"
        )));
    }
    for (j, b) in bands.iter().enumerate() {
        if !(b.lower < b.upper) {
            return Err(Error::OverlappingBands(format!(
                "band {} has lower {} >= upper {}",
                j + 1,
                b.lower,
                b.upper
            )));
        }
        if j > 0 && bands[j - 1].upper > b.lower {
            return Err(Error::OverlappingBands(format!(
                "band {} ends at {} after band {} starts at {}",
                j,
                bands[j - 1].upper,
                j + 1,
                b.lower
            )));
        }
    }
    Ok(bands
        .iter()
        .map(|b| {
            let members: Vec<usize> = spectrum
                .points
                .iter()
                .enumerate()
                .filter(|(_, pt)| b.contains(pt.freq_hz))
                .map(|(idx, _)| idx)
                .collect();
            let center = b.center();
            let value = members
                .iter()
                .map(|&idx| {
                    let pt = &spectrum.points[idx];
                    pt.amplitude * kernel(center - pt.freq_hz, sigma_hz)
                })
                .sum();
            NonlinearMode {
                band: *b,
                value,
                members,
            }
        })
        .collect())
}

/// States ordered by normalized magnitude, descending; ties by index.
pub fn rank_states(values: &[Complex64]) -> Result<Vec<(usize, f64)>> {
    let norm = normalized_magnitudes(values);
    if norm.iter().all(|v| *v == 0.0) {
        return Err(Error::AllZero);
    }
    let mut ranked: Vec<(usize, f64)> = norm.into_iter().enumerate().collect();
    ranked.sort_by(|a, b| b.1.total_cmp(&a.1).then(a.0.cmp(&b.0)));
    Ok(ranked)
}

/// TNPF `p2(t, f)` of every state at a target frequency.
pub fn tnpf_profile(
    basis: &ModalBasis,
    nf: &SecondOrderNF,
    config: &TnpfConfig,
    t: f64,
    f_target: f64,
) -> Result<Vec<Complex64>> {
    config.validate(basis.n())?;
    (0..basis.n())
        .map(|k| {
            let mut s = pf_spectrum(basis, nf, config, k, t)?;
            if !config.include_dc {
                s = s.without_dc_resonances();
            }
            Ok(convolve_at(&s, f_target, config.sigma_hz))
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::modal::decompose;
    use crate::normalform::{SecondOrderNF, DEFAULT_DENOM_TOL};
    use crate::sysmodel::QuadraticModel;
    use nalgebra::DVector;

    fn c(re: f64) -> Complex64 {
        Complex64::new(re, 0.0)
    }

    fn cascade() -> (ModalBasis, SecondOrderNF) {
        let a = DMatrix::from_row_slice(2, 2, &[-1.0, 0.0, 0.0, -3.0]);
        let h0 = DMatrix::from_row_slice(2, 2, &[0.0, 0.0, 0.0, 2.0]);
        let m = QuadraticModel::new(
            a,
            vec![h0, DMatrix::zeros(2, 2)],
            DVector::zeros(2),
            vec!["x1".into(), "x2".into()],
        )
        .unwrap();
        let b = decompose(m.a()).unwrap();
        let nf = SecondOrderNF::build(&m, &b, DEFAULT_DENOM_TOL).unwrap();
        (b, nf)
    }

    fn spectrum_of(points: &[(f64, f64)]) -> PfSpectrum {
        PfSpectrum {
            state: 0,
            time: 0.0,
            points: points
                .iter()
                .enumerate()
                .map(|(i, &(f, a))| SpectrumPoint {
                    freq_hz: f,
                    amplitude: c(a),
                    kind: PointKind::Linear,
                    source: PointSource::Mode(i),
                })
                .collect(),
        }
    }

    #[test]
    fn pair_index_matches_enumeration() {
        for n in 1..6 {
            let pairs = mode_pairs(n);
            let set = ParticipationSet {
                alpha: vec![1.0; n],
                p_lin: DMatrix::zeros(n, n),
                p2: DMatrix::zeros(n, n),
                p2nl: DMatrix::zeros(n, n),
                pairs: pairs.clone(),
                p2res: DMatrix::zeros(n, pairs.len()),
                psi2: DMatrix::zeros(n, n),
            };
            for (j, &(p, q)) in pairs.iter().enumerate() {
                assert_eq!(set.pair_index(p, q), j);
                assert_eq!(set.pair_index(q, p), j);
            }
        }
    }

    #[test]
    fn cascade_nonlinear_pf() {
        let (b, nf) = cascade();
        let set = nonlinear_pf(&b, &nf, &[1.0, 1.0]).unwrap();
        // psi2[0][1] = -h2[0][1][1] = 0.2, so z0 for e_2 is (0.2, 1)
        assert!((set.psi2()[(0, 1)] - c(0.2)).norm() < 1e-14);
        assert_eq!(set.nonlinear()[(1, 1)], c(1.0));
        assert_eq!(set.nonlinear()[(0, 0)], c(1.0));
        assert!(set.nonlinear()[(0, 1)].norm() == 0.0);
        // perturbing x1 alone never excites the (2,2) pair, and perturbing x2
        // alone has no linear-mode path into x1's own row
        assert!(set.resonance().iter().all(|v| v.norm() == 0.0));
        assert!((pair_shape(&b, &nf, 0, 1, 1) - c(-0.2)).norm() < 1e-14);
        let sum = set.linear() + set.nonlinear_extra();
        assert_eq!(&sum, set.nonlinear());
    }

    #[test]
    fn extended_pf_cases() {
        let (b, nf) = cascade();
        let set = nonlinear_pf(&b, &nf, &[1.0, 1.0]).unwrap();
        for k in 0..2 {
            let e = extended_pf(&b, &nf, k, &[1.0], 0.0).unwrap();
            for i in 0..2 {
                assert!((e[i] - set.nonlinear()[(k, i)]).norm() < 1e-15);
            }
            let once = extended_pf(&b, &nf, k, &[0.3], 0.7).unwrap();
            let twice = extended_pf(&b, &nf, k, &[0.3, 0.3], 0.7).unwrap();
            for i in 0..2 {
                assert!((once[i] - twice[i]).norm() < 1e-15);
            }
        }
        assert!(matches!(
            extended_pf(&b, &nf, 0, &[], 0.0),
            Err(Error::EmptyScaleSet)
        ));
        assert!(extended_pf(&b, &nf, 5, &[1.0], 0.0).is_err());
    }

    #[test]
    fn convolution_kernel_properties() {
        let s = spectrum_of(&[(0.59, 2.0)]);
        assert_eq!(convolve_at(&s, 0.59, 0.1), c(2.0));
        let w = convolve_at(&spectrum_of(&[(1.11, 1.0)]), 0.59, 0.1).re;
        assert!((w - (-0.52_f64 * 0.52 / 0.02).exp()).abs() < 1e-18);
        assert!(w < 1.5e-6 && w > 1.0e-6);
        assert_eq!(convolve_at(&spectrum_of(&[]), 1.0, 0.1), c(0.0));
        let narrow = convolve_at(&spectrum_of(&[(1.0, 1.0), (1.2, 5.0)]), 1.0, 1e-6);
        assert_eq!(narrow, c(1.0));
    }

    #[test]
    fn nonlinear_mode_bands() {
        let s = spectrum_of(&[(0.59, 1.0), (1.11, 0.5), (1.11, 0.25), (2.2, 3.0)]);
        let bands = [
            Band::new(0.4, 0.78),
            Band::new(0.9, 1.32),
            Band::new(1.5, 1.8),
        ];
        let modes = nonlinear_modes(&s, &bands, 0.1).unwrap();
        assert_eq!(modes[0].members, vec![0]);
        assert!((modes[0].value - c(kernel(0.59 - 0.59, 0.1))).norm() < 1e-15);
        assert_eq!(modes[1].members, vec![1, 2]);
        assert!((modes[1].value - c(0.75 * kernel(1.11 - 1.11, 0.1))).norm() < 1e-15);
        assert!(modes[2].members.is_empty());
        assert_eq!(modes[2].value, c(0.0));

        let centered = nonlinear_modes(&s, &[Band::new(0.49, 0.69)], 0.1).unwrap();
        assert!((centered[0].value - c(1.0)).norm() < 1e-12);

        let overlapping = [Band::new(0.4, 1.0), Band::new(0.9, 1.3)];
        assert!(matches!(
            nonlinear_modes(&s, &overlapping, 0.1),
            Err(Error::OverlappingBands(_))
        ));
    }

    #[test]
    fn ranking_follows_table_layout() {
        let r = rank_states(&[c(1.0), c(0.05), c(0.86), c(0.62)]).unwrap();
        let order: Vec<usize> = r.iter().map(|x| x.0 + 1).collect();
        assert_eq!(order, vec![1, 3, 4, 2]);
        assert!((r[1].1 - 0.86).abs() < 1e-15);

        let nl = rank_states(&[c(1.00), c(0.02), c(0.37), c(0.40)]).unwrap();
        let order: Vec<usize> = nl.iter().map(|x| x.0 + 1).collect();
        assert_eq!(order, vec![1, 4, 3, 2]);

        let tie = rank_states(&[c(2.0), c(-2.0), Complex64::new(0.0, 2.0)]).unwrap();
        assert_eq!(tie, vec![(0, 1.0), (1, 1.0), (2, 1.0)]);
        assert!(matches!(
            rank_states(&[c(0.0), c(0.0)]),
            Err(Error::AllZero)
        ));
    }

    #[test]
    fn config_validation() {
        let mut cfg = TnpfConfig::new(2);
        assert!(cfg.validate(2).is_ok());
        assert!(cfg.validate(3).is_err());
        cfg.sigma_hz = 0.0;
        assert!(cfg.validate(2).is_err());
        let mut cfg = TnpfConfig::new(2);
        cfg.alpha[1] = -1.0;
        assert!(cfg.validate(2).is_err());
        let mut cfg = TnpfConfig::new(2);
        cfg.time_grid = vec![-0.1];
        assert!(cfg.validate(2).is_err());
    }
}
