//! Reduced-range quadrature: the lognormal integral folded onto `x ∈ (0, 1]`
//! through the reciprocal symmetry, evaluated adaptively.

use std::f64::consts::{FRAC_PI_2, PI};

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::quad::{integrate, try_integrate, QuadConfig};

pub const MAX_REDUCED_DERIVATIVE: u32 = 64;

const INV_SQRT_2PI: f64 = 0.398_942_280_401_432_7;
const GAUSS_REACH: f64 = 10.0;

fn config() -> QuadConfig {
    QuadConfig { abs_tol: 0.0, rel_tol: 1e-13, max_intervals: 4000 }
}

fn check(s_re: f64, sigma: f64, k: u32) -> Result<()> {
    if !(sigma > 0.0 && sigma.is_finite()) {
        return Err(Error::domain(format!("sigma must be positive, got {sigma}")));
    }
    if !(s_re >= 0.0) {
        return Err(Error::domain(format!("reduced-range transform needs Re s >= 0, got {s_re}")));
    }
    if k > MAX_REDUCED_DERIVATIVE {
        return Err(Error::invalid(format!("derivative order must be <= {MAX_REDUCED_DERIVATIVE}, got {k}")));
    }
    Ok(())
}

/// `M(s) = ∫₀¹ p(x)(e^{−sx} + e^{−s/x}) dx` for real `s ≥ 0`.
pub fn mgf_reduced(s: f64, sigma: f64) -> Result<f64> {
    mgf_derivative_reduced(s, sigma, 0)
}

/// `dᵏM/dsᵏ = (−1)ᵏ ∫₀¹ p(x)(xᵏe^{−sx} + x^{−k}e^{−s/x}) dx`.
///
/// With `x = e^{−σv}` both halves become Gaussian-weighted integrals over
/// `v ≥ 0`.
pub fn mgf_derivative_reduced(s: f64, sigma: f64, k: u32) -> Result<f64> {
    check(s, sigma, k)?;
    let kf = k as f64;
    let f = |v: f64| {
        let a = -0.5 * v * v;
        let t = sigma * v;
        INV_SQRT_2PI * ((a - kf * t - s * (-t).exp()).exp() + (a + kf * t - s * t.exp()).exp())
    };
    let peak = kf * sigma;
    let end = peak + GAUSS_REACH;
    let mut total = integrate(f, 0.0, peak.max(1.0), config())?.value;
    if end > peak.max(1.0) {
        total += integrate(f, peak.max(1.0), end, config())?.value;
    }
    Ok(if k % 2 == 0 { total } else { -total })
}

/// Lower-half contribution `∫₀¹ p(x) xᵏ e^{−sx} dx` and upper-half
/// `∫₁^∞ p(y) yᵏ e^{−sy} dy` separately, for real `s`.
pub fn reduced_halves(s: f64, sigma: f64, k: u32) -> Result<(f64, f64)> {
    check(s, sigma, k)?;
    let kf = k as f64;
    let lower = integrate(
        |v: f64| INV_SQRT_2PI * (-0.5 * v * v - kf * sigma * v - s * (-sigma * v).exp()).exp(),
        0.0,
        GAUSS_REACH,
        config(),
    )?
    .value;
    let peak = kf * sigma;
    let upper = integrate(
        |v: f64| INV_SQRT_2PI * (-0.5 * v * v + kf * sigma * v - s * (sigma * v).exp()).exp(),
        0.0,
        peak + GAUSS_REACH,
        config(),
    )?
    .value;
    Ok((lower, upper))
}

/// `E[Xᵏ]` of a zero-location lognormal by direct quadrature over the whole
/// line (used as an independent check of the derivative engines).
pub fn moment_by_quadrature(sigma: f64, k: f64) -> Result<f64> {
    let c = k * sigma;
    Ok(integrate(|v: f64| INV_SQRT_2PI * (-0.5 * v * v + k * sigma * v).exp(), c - 14.0, c + 14.0, config())?.value)
}

/// Reduced-range transform at complex `s` with `Re s ≥ 0`, including the
/// k-th derivative.
///
/// Off the real axis the integral over `x > 0` is moved onto the ray
/// `x = r·e^{jβ}`, `β = −arg(s)·min(1, 2σ)`, so `e^{−sx}` decays along the
/// path instead of oscillating. With `u = ln r` this is
/// `∫ exp(−(u+jβ)²/(2σ²) + k(u+jβ) − s·e^{u+jβ}) du / (σ√(2π))`.
/// The turn is limited for small σ, where the continued density grows
/// as `e^{β²/(2σ²)}` off the real axis.
pub fn transform_reduced_derivative(s: Complex64, sigma: f64, k: u32) -> Result<Complex64> {
    check(s.re, sigma, k)?;
    if s.im == 0.0 {
        return Ok(Complex64::new(mgf_derivative_reduced(s.re, sigma, k)?, 0.0));
    }
    let kf = k as f64;
    let s2 = sigma * sigma;
    let theta = s.arg().clamp(-FRAC_PI_2, FRAC_PI_2);
    let beta = -theta * (2.0 * sigma).min(1.0);
    let jb = Complex64::new(0.0, beta);
    let rot = s * jb.exp();
    let norm = 1.0 / (sigma * (2.0 * PI).sqrt());

    let f = |u: f64| {
        let z = u + jb;
        let e = -z * z / (2.0 * s2) + kf * z - rot * u.exp();
        let v = norm * e.exp();
        if v.re.is_finite() && v.im.is_finite() {
            Ok(v)
        } else {
            Err(Error::Overflow(format!("reduced-range integrand at u = {u}")))
        }
    };
    // Gaussian reach widened by the off-axis growth factor.
    let reach = sigma * (2.0 * 50.0 + (beta / sigma).powi(2)).sqrt();
    let centre = kf * s2;
    // Beyond this point e^{−Re(rot)·e^u} is negligible.
    let cut = if rot.re > 0.0 { (60.0 / rot.re).ln() } else { f64::INFINITY };
    let lo = centre - reach;
    let hi = (centre + reach).min(cut.max(lo + 1.0));
    let cfg = QuadConfig { abs_tol: 1e-17, rel_tol: 1e-13, max_intervals: 4000 };
    let mid = (-rot.norm().ln()).clamp(lo, hi);
    let mut total = Complex64::new(0.0, 0.0);
    for (a, b) in [(lo, mid), (mid, hi)] {
        if b > a {
            total += try_integrate(f, a, b, cfg)?.value;
        }
    }
    Ok(if k % 2 == 0 { total } else { -total })
}

pub fn transform_reduced(s: Complex64, sigma: f64) -> Result<Complex64> {
    transform_reduced_derivative(s, sigma, 0)
}

/// Characteristic function `E[e^{jωX}]` of a zero-location lognormal.
pub fn chf_reduced(omega: f64, sigma: f64) -> Result<Complex64> {
    if omega == 0.0 {
        return Ok(Complex64::new(1.0, 0.0));
    }
    let c = transform_reduced(Complex64::new(0.0, -omega.abs()), sigma)?;
    Ok(if omega < 0.0 { c.conj() } else { c })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn normalisation() {
        for sigma in [0.1, 0.5, 1.0, 2.0, 3.0] {
            assert!((mgf_reduced(0.0, sigma).unwrap() - 1.0).abs() < 1e-10);
        }
    }

    #[test]
    fn halves_are_equal_at_zero() {
        for k in 0..=8u32 {
            let (lo, hi) = reduced_halves(0.0, 0.8, k).unwrap();
            if k == 0 {
                assert!((lo - hi).abs() < 1e-8);
            }
            // the inverse moment integrand on (0,1] mirrors the positive moment on [1,∞)
            let d = mgf_derivative_reduced(0.0, 0.8, k).unwrap().abs();
            let m = moment_by_quadrature(0.8, k as f64).unwrap();
            let inv = moment_by_quadrature(0.8, -(k as f64)).unwrap();
            assert!((d - m).abs() <= 1e-8 * m);
            assert!((inv - m).abs() <= 1e-8 * m);
        }
    }

    #[test]
    fn reduced_matches_high_order_gh() {
        let a = mgf_reduced(2.0, 1.0).unwrap();
        let b = crate::forward::mgf::mgf_gh(2.0, 1.0, 64).unwrap();
        assert!(((a - b) / a).abs() < 1e-6);
    }

    #[test]
    fn derivatives_match_finite_differences() {
        let (s, sigma) = (1.5, 0.7);
        let h = 1e-3;
        for k in 1..=3u32 {
            let f = |x: f64| mgf_derivative_reduced(x, sigma, k - 1).unwrap();
            let fd = (f(s - 2.0 * h) - 8.0 * f(s - h) + 8.0 * f(s + h) - f(s + 2.0 * h)) / (12.0 * h);
            let d = mgf_derivative_reduced(s, sigma, k).unwrap();
            assert!(((d - fd) / d).abs() < 1e-8, "k = {k}");
        }
    }

    #[test]
    fn complex_path_agrees_on_real_axis_limit() {
        let s = Complex64::new(2.0, 1e-9);
        let c = transform_reduced(s, 1.2).unwrap();
        assert!((c.re - mgf_reduced(2.0, 1.2).unwrap()).abs() < 1e-8);
    }

    #[test]
    fn chf_matches_direct_real_axis_quadrature() {
        // low frequency: direct oscillatory quadrature in v is still accurate
        for sigma in [0.5, 1.0] {
            let w = 1.3;
            let direct = integrate(
                |v: f64| INV_SQRT_2PI * (-0.5 * v * v).exp() * Complex64::new(0.0, w * (sigma * v).exp()).exp(),
                -12.0,
                12.0,
                QuadConfig { abs_tol: 1e-14, rel_tol: 1e-13, max_intervals: 20000 },
            )
            .unwrap()
            .value;
            let c = chf_reduced(w, sigma).unwrap();
            assert!((c - direct).norm() < 1e-10, "sigma = {sigma}: {c} vs {direct}");
        }
    }

    #[test]
    fn chf_conjugate_symmetry_and_bound() {
        let a = chf_reduced(3.0, 1.0).unwrap();
        let b = chf_reduced(-3.0, 1.0).unwrap();
        assert_eq!(a.conj(), b);
        for w in [0.01, 0.1, 1.0, 10.0, 100.0, 1000.0] {
            for sigma in [0.25, 1.0, 2.0] {
                assert!(chf_reduced(w, sigma).unwrap().norm() <= 1.0 + 1e-12);
            }
        }
    }

    #[test]
    fn chf_first_derivative_gives_mean() {
        // φ'(0) = j·E[X]
        let sigma = 0.9;
        let d = transform_reduced_derivative(Complex64::new(0.0, -1e-8), sigma, 1).unwrap();
        let mean = (0.5 * sigma * sigma).exp();
        assert!((d.re + mean).abs() < 1e-6);
    }
}
