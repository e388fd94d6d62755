use approx::assert_abs_diff_eq;
use hyperconv_core::measure::{
    convolve_r, fourier_stieltjes, neumann_inverse, pair, tv_distance, GridMeasure,
};
use num_complex::Complex64;
use proptest::prelude::*;

const H: f64 = 0.05;

fn measure() -> impl Strategy<Value = GridMeasure> {
    (
        prop::collection::vec((-20i64..20, -1.0f64..1.0), 0..4),
        -20i64..20,
        prop::collection::vec(-1.0f64..1.0, 0..30),
    )
        .prop_map(|(atoms, first, masses)| {
            let atoms: Vec<(f64, f64)> = atoms.into_iter().map(|(k, m)| (k as f64 * H, m)).collect();
            let d = GridMeasure::from_nodal_masses(first, H, &masses);
            GridMeasure::new(atoms, d.origin(), H, d.density().to_vec()).unwrap()
        })
}

fn scale_of(m: &GridMeasure) -> f64 {
    m.tv_norm().max(1.0)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn convolution_commutes_and_associates(a in measure(), b in measure(), c in measure()) {
        let ab = convolve_r(&a, &b).unwrap();
        let ba = convolve_r(&b, &a).unwrap();
        let s = scale_of(&a) * scale_of(&b);
        prop_assert!(tv_distance(&ab, &ba) <= 1e-8 * s);
        let l = convolve_r(&ab, &c).unwrap();
        let r = convolve_r(&a, &convolve_r(&b, &c).unwrap()).unwrap();
        prop_assert!(tv_distance(&l, &r) <= 1e-8 * s * scale_of(&c));
    }

    #[test]
    fn convolution_multiplies_mass_and_transform(a in measure(), b in measure(), lam in -5.0f64..5.0) {
        let ab = convolve_r(&a, &b).unwrap();
        let s = scale_of(&a) * scale_of(&b);
        prop_assert!((ab.mass() - a.mass() * b.mass()).abs() <= 1e-10 * s);
        let z = Complex64::new(lam, 0.0);
        let lhs = fourier_stieltjes(&ab, z);
        let rhs = fourier_stieltjes(&a, z) * fourier_stieltjes(&b, z);
        prop_assert!((lhs - rhs).norm() <= 1e-6 * s);
    }

    #[test]
    fn tv_triangle_inequality(a in measure(), b in measure(), c in measure()) {
        let ac = tv_distance(&a, &c);
        let ab = tv_distance(&a, &b);
        let bc = tv_distance(&b, &c);
        prop_assert!(ac <= ab + bc + 1e-12 * (ab + bc + 1.0));
    }

    #[test]
    fn pairing_with_one_is_mass(a in measure()) {
        prop_assert!((pair(&a, |_| 1.0) - a.mass()).abs() <= 1e-12 * scale_of(&a));
    }

    #[test]
    fn tv_norm_counts_atoms_and_nodes(a in measure()) {
        let direct: f64 = a.atoms().iter().map(|p| p.1.abs()).sum::<f64>()
            + a.nodal_masses().iter().map(|m| m.abs()).sum::<f64>();
        prop_assert!((a.tv_norm() - direct).abs() <= 1e-12 * scale_of(&a));
    }

    #[test]
    fn resampling_conserves_mass(a in measure(), k in 1usize..4, shift in 0.0f64..1.0) {
        let r = a.resample(shift * H, H / k as f64);
        prop_assert!((r.mass() - a.mass()).abs() <= 1e-9 * scale_of(&a));
    }
}

#[test]
fn dirac_convolution_adds_positions() {
    let c = convolve_r(&GridMeasure::atom(1.0, 1.0, H), &GridMeasure::atom(2.0, 1.0, H)).unwrap();
    assert_eq!(c.atoms().len(), 1);
    assert_abs_diff_eq!(c.atoms()[0].0, 3.0, epsilon = 1e-12);
    assert_abs_diff_eq!(c.mass(), 1.0, epsilon = 1e-15);
}

#[test]
fn boxes_convolve_to_triangle() {
    let h = 1e-3;
    let b = GridMeasure::from_cdf(|t| t, 0.0, 1.0, h);
    let c = convolve_r(&b, &b).unwrap();
    assert_abs_diff_eq!(c.density_at(1.0), 1.0, epsilon = 2e-3);
    assert_abs_diff_eq!(c.density_at(0.5), 0.5, epsilon = 2e-3);
    assert_abs_diff_eq!(c.mass(), 1.0, epsilon = 1e-12);
}

#[test]
fn distance_examples() {
    let d0 = GridMeasure::dirac(0.0);
    assert_eq!(tv_distance(&d0, &d0), 0.0);
    assert_abs_diff_eq!(tv_distance(&d0, &GridMeasure::dirac(1.0)), 2.0, epsilon = 1e-15);
    let u = GridMeasure::from_cdf(|t| t / 100.0, -50.0, 50.0, 1e-2);
    assert_abs_diff_eq!(tv_distance(&u, &u.shift(1.0)), 0.02, epsilon = 1e-9);
}

#[test]
fn transform_examples() {
    assert_abs_diff_eq!(fourier_stieltjes(&GridMeasure::dirac(0.0), Complex64::new(2.0, 0.0)).re, 1.0);
    let b = GridMeasure::from_cdf(|t| 0.5 * t, -1.0, 1.0, 1e-3);
    assert!(fourier_stieltjes(&b, Complex64::new(std::f64::consts::PI, 0.0)).norm() < 1e-6);
}

#[test]
fn neumann_examples() {
    let h = 1e-3;
    let zero = GridMeasure::zero(h);
    let target = GridMeasure::from_cdf(|t| t, 0.0, 1.0, h);
    let (r, _) = neumann_inverse(&zero, &target, 1e-12, None).unwrap();
    assert!(tv_distance(&r, &target) < 1e-15);

    let half = GridMeasure::atom(-0.5, 0.5, h);
    let (r, _) = neumann_inverse(&half, &GridMeasure::atom(0.0, 1.0, h), 1e-12, None).unwrap();
    assert_abs_diff_eq!(r.mass(), 4.0 / 3.0, epsilon = 1e-10);

    let u2 = GridMeasure::from_cdf(|e| (2.0 * e).exp(), -(1e12f64).ln() / 2.0, 0.0, h);
    let (r, _) = neumann_inverse(&u2, &GridMeasure::atom(0.0, 1.0, h), 1e-10, Some((-1000.0, 0.0))).unwrap();
    assert_abs_diff_eq!(r.mass(), 2.0, epsilon = 1e-6);
}
