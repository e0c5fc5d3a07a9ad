#![allow(dead_code)]

use nalgebra::{DMatrix, DVector};
use nfpf_core::{decompose, QuadraticModel, SecondOrderNF, DEFAULT_DENOM_TOL};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Random real matrix shifted so its spectral abscissa is `-margin`.
pub fn random_stable_matrix(rng: &mut impl Rng, n: usize, margin: f64) -> DMatrix<f64> {
    let a = DMatrix::from_fn(n, n, |_, _| rng.random_range(-1.0..1.0));
    let abscissa = a
        .complex_eigenvalues()
        .iter()
        .map(|l| l.re)
        .fold(f64::NEG_INFINITY, f64::max);
    a - DMatrix::identity(n, n) * (abscissa + margin)
}

fn min_denominator(model: &QuadraticModel) -> f64 {
    let b = decompose(model.a()).unwrap();
    let l = b.lambdas();
    let n = l.len();
    let mut best = f64::INFINITY;
    for i in 0..n {
        for p in 0..n {
            for q in p..n {
                best = best.min((l[p] + l[q] - l[i]).norm());
            }
        }
    }
    best
}

/// Random stable quadratic model whose normal-form denominators all exceed
/// `min_denom`.
pub fn random_quadratic(rng: &mut impl Rng, n: usize, min_denom: f64) -> QuadraticModel {
    loop {
        let margin = rng.random_range(0.3..1.0);
        let a = random_stable_matrix(rng, n, margin);
        let h: Vec<DMatrix<f64>> = (0..n)
            .map(|_| {
                let m = DMatrix::from_fn(n, n, |_, _| rng.random_range(-1.0..1.0));
                (&m + m.transpose()) * 0.5
            })
            .collect();
        let labels = (1..=n).map(|i| format!("x{i}")).collect();
        let model = QuadraticModel::new(a, h, DVector::zeros(n), labels).unwrap();
        if decompose(model.a()).is_err() {
            continue;
        }
        if min_denominator(&model) > min_denom {
            let b = decompose(model.a()).unwrap();
            let nf = SecondOrderNF::build(&model, &b, DEFAULT_DENOM_TOL).unwrap();
            assert!(nf.resonant().is_empty());
            return model;
        }
    }
}
