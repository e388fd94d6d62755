use approx::assert_abs_diff_eq;
use hyperconv_core::eigen::phi_at_points;
use hyperconv_core::kernel::{
    convolve_h, kernel_density, kernel_density_with, translate_function, HyperbolicGrid, KernelMethod, KernelOptions,
};
use hyperconv_core::measure::{tv_distance, GridMeasure};
use hyperconv_core::SturmLiouvilleModel;
use num_complex::Complex64;
use proptest::prelude::*;

fn marched(model: &SturmLiouvilleModel, x: f64, y: f64, h: f64) -> GridMeasure {
    let opts = KernelOptions {
        h,
        method: Some(KernelMethod::Marched),
        refinement_check: false,
    };
    kernel_density_with(model, x, y, opts).unwrap().measure
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(12))]

    #[test]
    fn kernel_is_symmetric(x in 0.2f64..2.5, y in 0.2f64..2.5, which in 0usize..3) {
        let m = [
            SturmLiouvilleModel::bessel_kingman(2.0).unwrap(),
            SturmLiouvilleModel::jacobi(1.0, 0.0).unwrap(),
            SturmLiouvilleModel::bounded_demo(),
        ][which].clone();
        let h = 2e-3;
        let a = marched(&m, x, y, h);
        let b = marched(&m, y, x, h);
        prop_assert!(tv_distance(&a, &b) < 1e-2, "{}", tv_distance(&a, &b));
    }

    #[test]
    fn kernel_is_probability_on_its_support(x in 0.1f64..3.0, y in 0.1f64..3.0, a0 in 0.5f64..4.0) {
        let m = SturmLiouvilleModel::bessel_kingman(a0).unwrap();
        let h = 2e-3;
        let k = marched(&m, x, y, h);
        prop_assert!((k.mass() - 1.0).abs() < 1e-10);
        prop_assert!(k.min_density() >= 0.0);
        let (lo, hi) = k.support().unwrap();
        prop_assert!(lo >= (x - y).abs() - h && hi <= x + y + h);
    }

    #[test]
    fn kernel_is_scale_invariant(c in 0.01f64..100.0) {
        let m = SturmLiouvilleModel::jacobi(1.0, 0.0).unwrap();
        let a = marched(&m, 1.0, 2.0, 2e-3);
        let b = marched(&m.scaled(c), 1.0, 2.0, 2e-3);
        prop_assert!(tv_distance(&a, &b) < 1e-9);
    }

    #[test]
    fn hypergroup_convolution_commutes(p in prop::collection::vec((1usize..40, 0.0f64..1.0), 1..3),
                                       q in prop::collection::vec((1usize..40, 0.0f64..1.0), 1..3)) {
        let h = 5e-3;
        let build = |v: &[(usize, f64)]| GridMeasure::new(v.iter().map(|&(k, m)| (k as f64 * 0.05, m)).collect(), 0.0, h, vec![]).unwrap();
        let (a, b) = (build(&p), build(&q));
        let n = SturmLiouvilleModel::naimark();
        let ab = convolve_h(&n, &a, &b, h).unwrap();
        let ba = convolve_h(&n, &b, &a, h).unwrap();
        prop_assert!(tv_distance(&ab, &ba) < 1e-10 * (1.0 + a.mass() * b.mass()));
        prop_assert!((ab.mass() - a.mass() * b.mass()).abs() < 1e-10);
    }
}

#[test]
fn naimark_closed_form_examples() {
    let n = SturmLiouvilleModel::naimark();
    let k = kernel_density(&n, 1.0, 2.0, 1e-3).unwrap();
    assert_abs_diff_eq!(k.mass(), 1.0, epsilon = 1e-10);
    assert_abs_diff_eq!(k.density_at(2.0), 1.0 / (2.0 * 1f64.sinh()), epsilon = 1e-12);
    assert_eq!(k.density_at(0.999), 0.0);
    assert_eq!(k.density_at(3.001), 0.0);
}

#[test]
fn marched_kernel_vanishes_outside_support() {
    let m = SturmLiouvilleModel::jacobi(1.0, 0.0).unwrap();
    let k = marched(&m, 1.0, 2.0, 1e-3);
    let (lo, hi) = k.support().unwrap();
    assert!(lo >= 1.0 - 1e-3 && hi <= 3.0 + 1e-3);
}

#[test]
fn kernel_is_norm_continuous() {
    let h = 1e-3;
    let n = SturmLiouvilleModel::naimark();
    let a = kernel_density(&n, 1.0, 2.0, h).unwrap().measure;
    let b = kernel_density(&n, 1.001, 2.0, h).unwrap().measure;
    assert!(tv_distance(&a, &b) < 5e-3);
    let a = marched(&n, 1.0, 2.0, h);
    let b = marched(&n, 1.001, 2.0, h);
    assert!(tv_distance(&a, &b) < 5e-3);
}

#[test]
fn kernel_is_bounded_on_compacts() {
    let h = 2e-3;
    for a0 in [2.0, 3.0] {
        let m = SturmLiouvilleModel::bessel_kingman(a0).unwrap();
        let mut worst: f64 = 0.0;
        for &x in &[0.5, 1.0, 2.0, 3.0] {
            for &y in &[0.5, 1.5, 3.0] {
                let k = marched(&m, x, y, h);
                let sup = k.nodal_masses().iter().fold(0.0f64, |s, v| s.max(*v)) / h;
                worst = worst.max(sup * x.min(y));
            }
        }
        assert!(worst < 10.0, "alpha0 = {a0}: {worst}");
    }
}

#[test]
fn marched_and_transmuted_routes_agree() {
    let m = SturmLiouvilleModel::jacobi(1.0, 0.0).unwrap();
    let a = marched(&m, 1.0, 2.0, 1e-3);
    let opts = KernelOptions {
        h: 1e-3,
        method: Some(KernelMethod::Transmutation),
        refinement_check: false,
    };
    let b = kernel_density_with(&m, 1.0, 2.0, opts).unwrap().measure;
    assert!(tv_distance(&a, &b) < 5e-3, "{}", tv_distance(&a, &b));
}

#[test]
fn convolution_with_delta_zero_is_identity() {
    let n = SturmLiouvilleModel::naimark();
    let h = 5e-3;
    let nu = GridMeasure::new(vec![(0.5, 0.25), (1.5, 0.75)], 0.0, h, vec![]).unwrap();
    let r = convolve_h(&n, &GridMeasure::atom(0.0, 1.0, h), &nu, h).unwrap();
    assert!(tv_distance(&r, &nu) < 1e-12);
    let k = convolve_h(&n, &GridMeasure::atom(1.0, 1.0, h), &GridMeasure::atom(1.0, 1.0, h), h).unwrap();
    assert_abs_diff_eq!(k.mass(), 1.0, epsilon = 1e-12);
    assert_abs_diff_eq!(k.density_at(1.0), 1f64.sinh() / (2.0 * 1f64.sinh().powi(2)), epsilon = 1e-3);
}

#[test]
fn translation_examples() {
    let h = 1e-3;
    let grid = HyperbolicGrid::new(4.0, h);
    for m in [SturmLiouvilleModel::naimark(), SturmLiouvilleModel::bessel_kingman(3.0).unwrap()] {
        let t = translate_function(&m, |_| 1.0, 0.7, grid).unwrap();
        assert!(t.values.iter().all(|v| (v - 1.0).abs() < 1e-12));
    }
    let n = SturmLiouvilleModel::naimark();
    let t = translate_function(&n, |x: f64| (-x).exp(), 1.0, grid).unwrap();
    let exact = (1.0 + (-4f64).exp() / 4.0 - 0.25) / (2.0 * 1f64.sinh().powi(2));
    assert_abs_diff_eq!(exact, 0.273181, epsilon = 1e-6);
    assert_abs_diff_eq!(t.value_at(1.0), exact, epsilon = 1e-3);
}

#[test]
fn translation_is_multiplicative_on_eigenfunctions() {
    let h = 1e-3;
    let n = SturmLiouvilleModel::naimark();
    let lam = 1.5;
    let phi = |x: f64| if x == 0.0 { 1.0 } else { (lam * x).sin() / (lam * x.sinh()) };
    let y = 0.8;
    let t = translate_function(&n, phi, y, HyperbolicGrid::new(4.0, h)).unwrap();
    for x in [0.5, 1.0, 2.0] {
        assert_abs_diff_eq!(t.value_at(x), phi(x) * phi(y), epsilon = 2e-3);
    }
    let ode = phi_at_points(&n, Complex64::new(lam, 0.0), &[y], Default::default()).unwrap()[0].0.re;
    assert_abs_diff_eq!(ode, phi(y), epsilon = 1e-8);
}

#[test]
fn translation_respects_sup_bound() {
    let h = 1e-3;
    let m = SturmLiouvilleModel::jacobi(1.0, 0.0).unwrap();
    let f = |x: f64| (3.0 * x).sin() * (-x).exp();
    let sup = (0..4000).map(|k| f(k as f64 * h).abs()).fold(0.0, f64::max);
    let t = translate_function(&m, f, 0.5, HyperbolicGrid::new(4.0, h)).unwrap();
    assert!(t.values.iter().all(|v| v.abs() <= sup + 1e-12));
}
