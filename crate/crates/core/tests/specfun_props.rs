use lnsum_core::specfun::{expint_e1, gauss_hermite, lambert_saddle, lambert_w0, lambert_w_real};
use lnsum_core::Complex64;
use proptest::prelude::*;

fn config() -> ProptestConfig {
    ProptestConfig { cases: 1000, ..ProptestConfig::default() }
}

proptest! {
    #![proptest_config(config())]

    #[test]
    fn real_lambert_residual(exp in -8.0f64..8.0, neg in 0.0f64..1.0, pick in 0u8..3) {
        let y = match pick {
            0 => 10f64.powf(exp),
            1 => -neg / std::f64::consts::E,
            _ => exp.abs(),
        };
        let w = lambert_w_real(y).unwrap();
        prop_assert!((w * w.exp() - y).abs() <= 1e-13 * y.abs().max(1.0));
        prop_assert!(w >= -1.0);
    }

    #[test]
    fn saddle_residual_upper_half_plane(r in -6.0f64..6.0, theta in 0.0f64..std::f64::consts::PI) {
        let zeta = Complex64::from_polar(10f64.powf(r), theta);
        let z = lambert_saddle(zeta).unwrap();
        prop_assert!((z * (-z).exp() - zeta).norm() <= 1e-12 * zeta.norm().max(1.0));
    }

    #[test]
    fn saddle_quadrant_on_imaginary_axis(r in -6.0f64..6.0) {
        let z = lambert_saddle(Complex64::new(0.0, 10f64.powf(r))).unwrap();
        prop_assert!(z.re <= 0.0 && z.im >= 0.0);
    }

    #[test]
    fn principal_w_residual(r in -6.0f64..6.0, theta in -3.1f64..3.1) {
        let z = Complex64::from_polar(10f64.powf(r), theta);
        let w = lambert_w0(z).unwrap();
        prop_assert!((w * w.exp() - z).norm() <= 1e-12 * z.norm().max(1.0));
    }
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 100, ..ProptestConfig::default() })]

    #[test]
    fn e1_derivative(r in -1.0f64..1.5, theta in -2.5f64..2.5) {
        let z = Complex64::from_polar(10f64.powf(r), theta);
        let h = 1e-5 * z.norm();
        let fd = (expint_e1(z + h).unwrap() - expint_e1(z - h).unwrap()) / (2.0 * h);
        let exact = -(-z).exp() / z;
        prop_assert!((fd - exact).norm() <= 1e-6 * exact.norm());
    }
}

#[test]
fn gauss_hermite_double_factorial_moments() {
    for n in 1..=64usize {
        let r = gauss_hermite(n).unwrap();
        let mut exact = 1.0f64;
        for m in 0..n {
            if m > 0 {
                exact *= (2 * m - 1) as f64 / 2.0;
            }
            let got: f64 = r.iter().map(|(x, w)| w * x.powi(2 * m as i32)).sum();
            assert!((got - exact).abs() <= 1e-12 * exact, "N = {n}, m = {m}");
        }
    }
}
