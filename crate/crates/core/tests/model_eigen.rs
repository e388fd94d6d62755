use approx::assert_abs_diff_eq;
use hyperconv_core::eigen::{c_function, phi_at_points, phi_lambda};
use hyperconv_core::model::{eval_log_deriv, index_rho, transmutation, validate_model, GrowthClass, ValidationGrid};
use hyperconv_core::{Error, SturmLiouvilleModel};
use num_complex::Complex64;
use proptest::prelude::*;

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn scale_leaves_coefficients_unchanged(c in 1e-3f64..1e3, x in 0.01f64..10.0, which in 0usize..3) {
        let m = [
            SturmLiouvilleModel::naimark(),
            SturmLiouvilleModel::jacobi(1.5, 0.5).unwrap(),
            SturmLiouvilleModel::custom("sinh(x)^2 * (1 + x^2)", Some(2.0), 1e-3).unwrap(),
        ][which].clone();
        let s = m.scaled(c);
        let rel = |a: f64, b: f64| (a - b).abs() <= 1e-12 * (1.0 + a.abs());
        prop_assert!(rel(m.log_deriv(x), s.log_deriv(x)));
        prop_assert!(rel(index_rho(&m), index_rho(&s)));
        let (t, u) = (transmutation(&m).unwrap(), transmutation(&s).unwrap());
        prop_assert!(rel(t.beta(x), u.beta(x)) && rel(t.q(x), u.q(x)));
        prop_assert!(rel(t.beta_inf(x), u.beta_inf(x)) && rel(t.q_inf(x), u.q_inf(x)));
    }

    #[test]
    fn jacobi_index(alpha in -0.4f64..3.0, gap in 0.0f64..2.0) {
        let beta = (alpha - gap).max(-0.5);
        let m = SturmLiouvilleModel::jacobi(alpha, beta).unwrap();
        prop_assert!((index_rho(&m) - (alpha + beta + 1.0)).abs() < 1e-12);
        prop_assert!((0.5 * m.log_deriv(40.0) - (alpha + beta + 1.0)).abs() < 1e-6);
    }
}

#[test]
fn log_derivative_examples() {
    let bk = SturmLiouvilleModel::bessel_kingman(2.0).unwrap();
    assert_abs_diff_eq!(eval_log_deriv(&bk, 0.5).unwrap(), 4.0, epsilon = 1e-12);
    let n = SturmLiouvilleModel::naimark();
    assert_abs_diff_eq!(eval_log_deriv(&n, 2.0).unwrap(), 2.074629, epsilon = 1e-6);
    assert_abs_diff_eq!(eval_log_deriv(&n, 1.0).unwrap(), 2.626070, epsilon = 1e-6);
    assert!(matches!(eval_log_deriv(&n, 0.0), Err(Error::Domain(_))));
    assert!(matches!(eval_log_deriv(&n, -1.0), Err(Error::Domain(_))));
}

#[test]
fn log_derivative_regular_near_zero() {
    for m in [
        SturmLiouvilleModel::naimark(),
        SturmLiouvilleModel::bessel_kingman(1.5).unwrap(),
        SturmLiouvilleModel::jacobi(1.0, 0.0).unwrap(),
        SturmLiouvilleModel::bounded_demo(),
    ] {
        let mut x = 1.0;
        while x >= 1e-6 {
            let r = m.log_deriv(x) - m.alpha0() / x;
            assert!(r.abs() < 10.0, "{m} at {x}: {r}");
            x /= 3.0;
        }
    }
}

#[test]
fn index_examples() {
    assert_eq!(index_rho(&SturmLiouvilleModel::bessel_kingman(3.3).unwrap()), 0.0);
    assert_eq!(index_rho(&SturmLiouvilleModel::naimark()), 1.0);
    assert_abs_diff_eq!(index_rho(&SturmLiouvilleModel::jacobi(0.5, -0.5).unwrap()), 1.0, epsilon = 1e-12);
}

#[test]
fn transmutation_examples() {
    let bk = transmutation(&SturmLiouvilleModel::bessel_kingman(2.0).unwrap()).unwrap();
    for x in [0.1, 1.0, 5.0] {
        assert_eq!(bk.beta(x), 0.0);
        assert_eq!(bk.q(x), 0.0);
        assert_eq!(bk.b(x).unwrap(), 1.0);
    }
    let n = transmutation(&SturmLiouvilleModel::naimark()).unwrap();
    assert_abs_diff_eq!(n.beta(1.0), 0.626070, epsilon = 1e-6);
    assert_abs_diff_eq!(n.beta_inf(2.0), 0.074629, epsilon = 1e-6);
    let mut prev = f64::INFINITY;
    for k in 1..40 {
        let b = n.beta_inf(k as f64 * 0.5);
        assert!(b >= 0.0 && b <= prev);
        prev = b;
    }
}

#[test]
fn validation_examples() {
    let g = ValidationGrid::default();
    let r = validate_model(&SturmLiouvilleModel::naimark(), g);
    assert!(r.passed, "{:?}", r.failures);
    assert_eq!(r.growth, GrowthClass::ExponentialNormalizable);
    assert_abs_diff_eq!(r.normalization_limit.unwrap(), 0.25, epsilon = 1e-6);
    let r = validate_model(&SturmLiouvilleModel::bessel_kingman(2.0).unwrap(), g);
    assert!(r.passed && r.rho == 0.0 && !r.a_bounded);
    let r = validate_model(&SturmLiouvilleModel::bounded_demo(), g);
    assert!(r.passed && r.rho == 0.0 && r.a_bounded);
    match SturmLiouvilleModel::custom("exp(x^2) - 1", None, 1e-3) {
        Ok(bad) => assert!(!validate_model(&bad, g).passed),
        Err(e) => assert!(matches!(e, Error::NonConvergence(_)), "{e}"),
    }
}

#[test]
fn spec_files_and_aliases() {
    let m = SturmLiouvilleModel::from_spec_str("family = jacobi\nalpha = 1\nbeta = 0\n").unwrap();
    assert_eq!(m.rho(), 2.0);
    assert_eq!(SturmLiouvilleModel::from_alias("jacobi:1,0").unwrap().rho(), 2.0);
    let e = SturmLiouvilleModel::from_spec_str("family = custom\na = sinh(x\n").unwrap_err();
    assert!(e.is_input_error());
    assert!(SturmLiouvilleModel::from_alias("bessel-kingman:-1").is_err());
}

#[test]
fn eigenfunction_examples() {
    let n = SturmLiouvilleModel::naimark();
    let v = phi_at_points(&n, Complex64::new(1.0, 0.0), &[1.0, 30.0], Default::default()).unwrap();
    assert_abs_diff_eq!(v[0].0.re, 1f64.sin() / 1f64.sinh(), epsilon = 1e-6);
    assert!(v[1].0.norm() < 1e-6 * v[0].0.norm());
    let s = phi_lambda(&n, Complex64::new(1.0, 0.0), 5.0, 1e-2).unwrap();
    assert_eq!(s.phi[0], Complex64::new(1.0, 0.0));
    assert_eq!(s.phi_prime[0], Complex64::new(0.0, 0.0));
    assert!(s.phi.iter().all(|z| z.im == 0.0));
    let c = c_function(&n, 1.0, None).unwrap();
    assert_abs_diff_eq!(c.c_plus.re, 0.0, epsilon = 1e-4);
    assert_abs_diff_eq!(c.c_plus.im, -1.0, epsilon = 1e-4);
    assert!(c.residual < 1e-4);
    assert!((c.c_minus - c.c_plus.conj()).norm() < 1e-10);
}

#[test]
fn c_function_regime_errors() {
    let bk = SturmLiouvilleModel::bessel_kingman(2.0).unwrap();
    assert!(matches!(c_function(&bk, 1.0, None), Err(Error::Regime(_))));
}

#[test]
fn custom_naimark_matches_builtin() {
    let c = SturmLiouvilleModel::custom("sinh(x)^2", None, 1e-3).unwrap();
    let n = SturmLiouvilleModel::naimark();
    for x in [0.01, 0.5, 3.0, 14.0, 40.0] {
        assert!((c.log_deriv(x) - n.log_deriv(x)).abs() < 1e-8 * n.log_deriv(x), "{x}");
    }
    assert_abs_diff_eq!(index_rho(&c), 1.0, epsilon = 1e-6);
    assert!(validate_model(&c, ValidationGrid::default()).passed);
}
