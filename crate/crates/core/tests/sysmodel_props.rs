mod common;

use nalgebra::{DMatrix, DVector};
use nfpf_core::bundled::{builtin, two_area_params, two_machine_params, BUILTIN_NAMES};
use nfpf_core::sysmodel::{default_fd_step, FnField, LoadedModel};
use nfpf_core::*;
use proptest::prelude::*;

fn polynomial_strategy() -> impl Strategy<Value = (QuadraticModel, Vec<f64>)> {
    (1usize..=5, any::<u64>()).prop_map(|(n, seed)| {
        use rand::Rng;
        let mut rng = common::rng(seed);
        let a = DMatrix::from_fn(n, n, |_, _| rng.random_range(-2.0..2.0));
        let h = (0..n)
            .map(|_| {
                let m = DMatrix::from_fn(n, n, |_, _| rng.random_range(-2.0..2.0));
                (&m + m.transpose()) * 0.5
            })
            .collect();
        let x_eq: Vec<f64> = (0..n).map(|_| rng.random_range(-3.0..3.0)).collect();
        let labels = (0..n).map(|i| format!("s{i}")).collect();
        let m = QuadraticModel::new(a, h, DVector::from_vec(x_eq.clone()), labels).unwrap();
        (m, x_eq)
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn finite_differences_recover_quadratic_fields((model, x_eq) in polynomial_strategy()) {
        let n = model.n();
        // same field expressed in absolute coordinates
        let field = FnField::new(n, |x: &[f64], out: &mut [f64]| {
            let dx: Vec<f64> = x.iter().zip(&x_eq).map(|(a, b)| a - b).collect();
            model.eval(&dx, out);
        });
        let fd = quadratize_finite_diff(&field, &x_eq, default_fd_step(&x_eq)).unwrap();
        prop_assert!((fd.a() - model.a()).amax() < 1e-7);
        for k in 0..n {
            prop_assert!((fd.hessian(k) - model.hessian(k)).amax() < 1e-4);
        }
    }
}

#[test]
fn two_machine_structure() {
    let model = build_swing_model(&two_machine_params()).unwrap();
    assert_eq!(model.n(), 3);
    let b = decompose(model.a()).unwrap();
    assert_eq!(b.oscillatory().count(), 1);
    assert_eq!((0..3).filter(|&i| b.is_real(i)).count(), 1);
    // zero transfer, lossless: lambda^2 + (D/2H) lambda + (omega_s/2H) 2 B = 0
    let ws = 2.0 * std::f64::consts::PI * 60.0;
    let (h, d, bb) = (4.0_f64, 2.0_f64, 1.2_f64);
    let disc = (d / (2.0 * h)).powi(2) - 4.0 * ws / (2.0 * h) * 2.0 * bb;
    let im = (-disc).sqrt() / 2.0;
    let i = b.oscillatory().next().unwrap();
    assert!((b.lambda(i).re + d / (4.0 * h)).abs() < 1e-9);
    assert!((b.lambda(i).im.abs() - im).abs() < 1e-8);
    let real = (0..3).find(|&i| b.is_real(i)).unwrap();
    assert!((b.lambda(real).re + d / (2.0 * h)).abs() < 1e-9);
}

#[test]
fn undamped_pair_is_on_the_imaginary_axis() {
    let mut p = two_machine_params();
    p.damping = vec![0.0, 0.0];
    let model = build_swing_model(&p).unwrap();
    let b = decompose(model.a()).unwrap();
    let i = b.oscillatory().next().unwrap();
    assert!(b.lambda(i).re.abs() < 1e-9);
}

#[test]
fn two_area_structure() {
    let p = two_area_params();
    let sys = SwingSystem::new(p.clone()).unwrap();
    let model = build_swing_model(&p).unwrap();
    assert_eq!(model.n(), 7);
    assert_eq!(model.labels(), sys.labels().as_slice());
    let mut out = vec![0.0; 7];
    sys.eval(model.x_eq().as_slice(), &mut out);
    assert!(out.iter().all(|v| v.abs() < 1e-8));
    let b = decompose(model.a()).unwrap();
    assert!(b.lambdas().iter().all(|l| l.re < 0.0));
    let freqs: Vec<f64> = b.oscillatory().map(|i| b.freq_hz(i)).collect();
    assert_eq!(freqs.len(), 3);
    assert_eq!(freqs.iter().filter(|f| (0.3..0.8).contains(*f)).count(), 1);
    assert_eq!(freqs.iter().filter(|f| (0.9..1.8).contains(*f)).count(), 2);
    // analytic quadratization agrees with finite differences of the full field
    let x_eq: Vec<f64> = model.x_eq().iter().copied().collect();
    let fd = quadratize_finite_diff(&sys, &x_eq, default_fd_step(&x_eq)).unwrap();
    assert!((fd.a() - model.a()).amax() < 1e-5 * model.a().amax());
    for k in 0..7 {
        let scale = model.hessian(k).amax().max(1.0);
        assert!((fd.hessian(k) - model.hessian(k)).amax() < 1e-3 * scale);
    }
}

#[test]
fn builtins_round_trip_through_json() {
    for name in BUILTIN_NAMES {
        let file = builtin(name).unwrap();
        let text = file.to_json_pretty();
        let back = ModelFile::from_json(&text).unwrap();
        assert_eq!(back, file, "{name}");
        let loaded = back.load().unwrap();
        let direct = file.load().unwrap();
        assert_eq!(loaded.quadratic().a(), direct.quadratic().a());
        match (name, &loaded) {
            ("cascade", LoadedModel::Quadratic(_)) => {}
            ("cascade", _) => panic!("cascade should be quadratic"),
            (_, LoadedModel::Swing { .. }) => {}
            _ => panic!("{name} should be a swing model"),
        }
    }
    assert!(builtin("nope").is_none());
}

#[test]
fn schema_errors_name_the_field() {
    let cases = [
        (
            r#"{"kind":"quadratic","n":1,"A":[["x"]],"H":[[[0]]],"x_eq":[0],"labels":["a"]}"#,
            "A[0][0]",
        ),
        (
            r#"{"kind":"quadratic","n":2,"A":[[0,0],[0,0]],"H":[[[0,0],[0,0]],[[0,0],[0]]],"x_eq":[0,0],"labels":["a","b"]}"#,
            "H[1][1]",
        ),
        (
            r#"{"kind":"swing","inertia":[1],"damping":[1],"p_mech":[0],"emf":[1],"Y_re":[[0]],"Y_im":[[0]]}"#,
            ".",
        ),
        (
            r#"{"kind":"swing","inertia":[1],"damping":[1],"p_mech":[0],"emf":[1],"Y_re":[[0]],"Y_im":[[0]],"omega_s":1,"extra":2}"#,
            "extra",
        ),
        (r#"{"n":1}"#, "kind"),
    ];
    for (text, path) in cases {
        match ModelFile::from_json(text).and_then(|f| f.load()) {
            Err(Error::Schema { path: p, .. }) => assert_eq!(p, path, "{text}"),
            other => panic!("{text}: {other:?}"),
        }
    }
}
