//! Small reference systems shipped with the crate.
//!
//! The two-area system is a classical-machine approximation of the well
//! known four-generator, two-area test network: two tightly coupled machine
//! pairs joined by a weak tie, with constant-impedance loads at each area
//! hub. Its parameters are illustrative, not a reproduction of any
//! published data set.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use std::f64::consts::PI;

use crate::sysmodel::{ModelFile, QuadraticModel, SwingParams, SwingSystem};

pub const NOMINAL_HZ: f64 = 60.0;

fn omega_s() -> f64 {
    2.0 * PI * NOMINAL_HZ
}

/// `x1' = -x1 + x2^2`, `x2' = -3 x2`: the second-order normal form of this
/// cascade is exact.
pub fn cascade_model() -> QuadraticModel {
    let a = DMatrix::from_row_slice(2, 2, &[-1.0, 0.0, 0.0, -3.0]);
    let h0 = DMatrix::from_row_slice(2, 2, &[0.0, 0.0, 0.0, 2.0]);
    QuadraticModel::new(
        a,
        vec![h0, DMatrix::zeros(2, 2)],
        DVector::zeros(2),
        vec!["x1".into(), "x2".into()],
    )
    .expect("cascade model is well formed")
}

/// Branch between two buses of a network with series impedance `z`.
#[derive(Debug, Clone, Copy)]
pub struct Branch {
    pub from: usize,
    pub to: usize,
    pub z: Complex64,
}

/// Bus admittance matrix of `buses` nodes with optional shunts.
pub fn admittance_matrix(
    buses: usize,
    branches: &[Branch],
    shunts: &[(usize, Complex64)],
) -> DMatrix<Complex64> {
    let mut y = DMatrix::from_element(buses, buses, Complex64::new(0.0, 0.0));
    for b in branches {
        let yb = Complex64::new(1.0, 0.0) / b.z;
        y[(b.from, b.from)] += yb;
        y[(b.to, b.to)] += yb;
        y[(b.from, b.to)] -= yb;
        y[(b.to, b.from)] -= yb;
    }
    for &(bus, ys) in shunts {
        y[(bus, bus)] += ys;
    }
    y
}

/// Eliminates every bus from index `keep` on: `Y_kk - Y_ke Y_ee^-1 Y_ek`.
pub fn kron_reduce(y: &DMatrix<Complex64>, keep: usize) -> DMatrix<Complex64> {
    let n = y.nrows();
    let e = n - keep;
    let y_kk = y.view((0, 0), (keep, keep)).into_owned();
    let y_ke = y.view((0, keep), (keep, e)).into_owned();
    let y_ek = y.view((keep, 0), (e, keep)).into_owned();
    let y_ee = y.view((keep, keep), (e, e)).into_owned();
    let inv = y_ee
        .try_inverse()
        .expect("eliminated block must be invertible");
    let mut r = y_kk - y_ke * inv * y_ek;
    // restore exact reciprocity lost to roundoff
    for i in 0..keep {
        for j in (i + 1)..keep {
            let avg = (r[(i, j)] + r[(j, i)]) * 0.5;
            r[(i, j)] = avg;
            r[(j, i)] = avg;
        }
    }
    r
}

/// Mechanical powers that make `delta` an equilibrium.
fn balanced(mut p: SwingParams, delta: &[f64]) -> SwingParams {
    let sys = SwingSystem::new(p.clone()).expect("bundled parameters are valid");
    p.p_mech = sys.electrical_power(delta);
    p
}

/// Two identical machines on a lossless tie, sharing no power.
pub fn two_machine_params() -> SwingParams {
    let b = 1.2;
    let y = DMatrix::from_row_slice(
        2,
        2,
        &[
            Complex64::new(0.0, -b),
            Complex64::new(0.0, b),
            Complex64::new(0.0, b),
            Complex64::new(0.0, -b),
        ],
    );
    SwingParams {
        inertia: vec![4.0, 4.0],
        damping: vec![2.0, 2.0],
        p_mech: vec![0.0, 0.0],
        emf: vec![1.0, 1.0],
        y,
        omega_s: omega_s(),
    }
}

/// Internal machine angles (rad) of the bundled two-area operating point.
pub const TWO_AREA_ANGLES: [f64; 4] = [0.95, 0.75, 0.15, 0.0];

/// Four classical machines in two areas. Machines 1-2 form area 1 and
/// machines 3-4 area 2; area 1 exports over the tie.
pub fn two_area_params() -> SwingParams {
    // 0..3 internal machine nodes, 4 = area-1 hub, 5 = area-2 hub
    let j = |x: f64| Complex64::new(0.0, x);
    let branches = [
        Branch {
            from: 0,
            to: 4,
            z: j(0.30),
        },
        Branch {
            from: 1,
            to: 4,
            z: j(0.25),
        },
        Branch {
            from: 2,
            to: 5,
            z: j(0.50),
        },
        Branch {
            from: 3,
            to: 5,
            z: j(0.55),
        },
        Branch {
            from: 4,
            to: 5,
            z: Complex64::new(0.02, 1.0),
        },
    ];
    let shunts = [(4, Complex64::new(1.0, 0.0)), (5, Complex64::new(1.8, 0.0))];
    let y = kron_reduce(&admittance_matrix(6, &branches, &shunts), 4);
    let inertia = vec![6.5, 6.5, 6.175, 6.175];
    let damping: Vec<f64> = inertia.iter().map(|h| 0.8 * h).collect();
    let params = SwingParams {
        inertia,
        damping,
        p_mech: vec![0.0; 4],
        emf: vec![1.05, 1.05, 1.05, 1.05],
        y,
        omega_s: omega_s(),
    };
    balanced(params, &TWO_AREA_ANGLES)
}

/// Names accepted by [`builtin`].
pub const BUILTIN_NAMES: [&str; 3] = ["two_machine", "cascade", "two_area"];

/// Bundled model as a model file.
pub fn builtin(name: &str) -> Option<ModelFile> {
    match name {
        "two_machine" => Some(ModelFile::from_swing_params(&two_machine_params())),
        "cascade" => Some(ModelFile::from_quadratic(&cascade_model())),
        "two_area" => Some(ModelFile::from_swing_params(&two_area_params())),
        _ => None,
    }
}
