//! Gauss-Hermite based MGF engines on the real axis (and their complex
//! continuation), the saddle-shifted asymptotic form and the high-frequency
//! Gamma-function approximation.

use std::f64::consts::{PI, SQRT_2};

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::specfun::{gauss_hermite_cached, lambert_w_real, ln_gamma_real};

pub const DEFAULT_ORDER: usize = 20;
pub const MAX_DERIVATIVE: u32 = 8;

/// Exponent used for the derivative weights `exp(n·√2·c·x_k)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum DerivativeExponent {
    /// `c = σ`, consistent with differentiating the quadrature sum.
    #[default]
    SigmaConsistent,
    /// `c = 1`, the exponent without σ.
    AsPrinted,
}

fn check_s(s: f64) -> Result<()> {
    if s >= 0.0 && s.is_finite() {
        Ok(())
    } else {
        Err(Error::domain(format!("MGF argument must be finite and >= 0, got {s}")))
    }
}

fn check_sigma(sigma: f64) -> Result<()> {
    if sigma > 0.0 && sigma.is_finite() {
        Ok(())
    } else {
        Err(Error::domain(format!("sigma must be positive, got {sigma}")))
    }
}

/// `Σ w_k exp(−s·exp(√2σx_k))` over the N-point rule.
pub fn mgf_gh(s: f64, sigma: f64, n: usize) -> Result<f64> {
    check_s(s)?;
    check_sigma(sigma)?;
    let rule = gauss_hermite_cached(n)?;
    Ok(rule.iter().map(|(x, w)| w * (-s * (SQRT_2 * sigma * x).exp()).exp()).sum())
}

/// GH sum at a complex argument (e.g. `s = −jω` for the CHF).
pub fn transform_gh(s: Complex64, sigma: f64, n: usize) -> Result<Complex64> {
    check_sigma(sigma)?;
    let rule = gauss_hermite_cached(n)?;
    Ok(rule.iter().map(|(x, w)| w * (-s * (SQRT_2 * sigma * x).exp()).exp()).sum())
}

/// Contributions `(M1, M2)` from nodes mapping to `x < 1` and `x > 1`.
/// A zero node (odd N) is shared equally.
pub fn mgf_split(s: f64, sigma: f64, n: usize) -> Result<(f64, f64)> {
    check_s(s)?;
    check_sigma(sigma)?;
    let rule = gauss_hermite_cached(n)?;
    let (mut m1, mut m2) = (0.0, 0.0);
    for (x, w) in rule.iter() {
        let term = w * (-s * (SQRT_2 * sigma * x).exp()).exp();
        if x < 0.0 {
            m1 += term;
        } else if x > 0.0 {
            m2 += term;
        } else {
            m1 += 0.5 * term;
            m2 += 0.5 * term;
        }
    }
    Ok((m1, m2))
}

/// Complex-argument split, used for the figure tables.
pub fn transform_split(s: Complex64, sigma: f64, n: usize) -> Result<(Complex64, Complex64)> {
    check_sigma(sigma)?;
    let rule = gauss_hermite_cached(n)?;
    let zero = Complex64::new(0.0, 0.0);
    let (mut m1, mut m2) = (zero, zero);
    for (x, w) in rule.iter() {
        let term = w * (-s * (SQRT_2 * sigma * x).exp()).exp();
        if x < 0.0 {
            m1 += term;
        } else if x > 0.0 {
            m2 += term;
        } else {
            m1 += 0.5 * term;
            m2 += 0.5 * term;
        }
    }
    Ok((m1, m2))
}

/// n-th derivative `(−1)ⁿ Σ w_k exp(n√2σx_k) exp(−s·exp(√2σx_k))`.
pub fn mgf_derivative_gh(s: f64, sigma: f64, order: u32, n: usize) -> Result<f64> {
    mgf_derivative_gh_with(s, sigma, order, n, DerivativeExponent::SigmaConsistent)
}

pub fn mgf_derivative_gh_with(s: f64, sigma: f64, order: u32, n: usize, exponent: DerivativeExponent) -> Result<f64> {
    check_s(s)?;
    check_sigma(sigma)?;
    if order > MAX_DERIVATIVE {
        return Err(Error::invalid(format!("derivative order must be <= {MAX_DERIVATIVE}, got {order}")));
    }
    let rule = gauss_hermite_cached(n)?;
    let c = match exponent {
        DerivativeExponent::SigmaConsistent => sigma,
        DerivativeExponent::AsPrinted => 1.0,
    };
    let k = order as f64;
    let sum: f64 = rule
        .iter()
        .map(|(x, w)| w * (k * SQRT_2 * c * x - s * (SQRT_2 * sigma * x).exp()).exp())
        .sum();
    Ok(if order % 2 == 0 { sum } else { -sum })
}

/// Saddle-shifted GH form `exp(−W²/(2σ²)) Σ w_k exp(−W·g(x_k)/σ²)` with
/// `W·e^W = sσ²` and `g(x) = exp(√2σx) − √2σx`.
pub fn mgf_asymptotic_gh(s: f64, sigma: f64, n: usize) -> Result<f64> {
    check_s(s)?;
    check_sigma(sigma)?;
    let s2 = sigma * sigma;
    let w = lambert_w_real(s * s2)?;
    let rule = gauss_hermite_cached(n)?;
    let sum: f64 = rule
        .iter()
        .map(|(x, wk)| {
            let t = SQRT_2 * sigma * x;
            wk * (-w * (t.exp() - t) / s2).exp()
        })
        .sum();
    Ok((-w * w / (2.0 * s2)).exp() * sum)
}

/// The same quantity written with the `(W² + 2W)` prefactor and
/// `exp(√2σx) − √2σx − 1` in the sum.
pub fn mgf_asymptotic_gh_expanded(s: f64, sigma: f64, n: usize) -> Result<f64> {
    check_s(s)?;
    check_sigma(sigma)?;
    let s2 = sigma * sigma;
    let w = lambert_w_real(s * s2)?;
    let rule = gauss_hermite_cached(n)?;
    let sum: f64 = rule
        .iter()
        .map(|(x, wk)| {
            let t = SQRT_2 * sigma * x;
            wk * (-w * (t.exp_m1() - t) / s2).exp()
        })
        .sum();
    Ok((-(w * w + 2.0 * w) / (2.0 * s2)).exp() * sum)
}

/// Leading saddle factor `exp(−(W² + 2W)/(2σ²))` of a single component.
pub fn mgf_saddle_prefactor(s: f64, sigma: f64) -> Result<f64> {
    check_s(s)?;
    check_sigma(sigma)?;
    let s2 = sigma * sigma;
    let w = lambert_w_real(s * s2)?;
    Ok((-(w * w + 2.0 * w) / (2.0 * s2)).exp())
}

/// Gamma-function approximation for large `s`:
/// `exp(−ln²s/(2σ²))·Γ(ln s/σ²)/(√(2π)σ)`.
pub fn mgf_barouch_kaufman(s: f64, sigma: f64) -> Result<f64> {
    mgf_barouch_kaufman_derivative(s, sigma, 0)
}

/// n-th derivative: the Gamma argument is raised by `n` and the result is
/// divided by `(−s)ⁿ`.
pub fn mgf_barouch_kaufman_derivative(s: f64, sigma: f64, n: u32) -> Result<f64> {
    check_sigma(sigma)?;
    if !(s > 1.0) || !s.is_finite() {
        return Err(Error::domain(format!("Barouch-Kaufman form needs ln s > 0, got s = {s}")));
    }
    let ls = s.ln();
    let s2 = sigma * sigma;
    let v = ls / s2 + n as f64;
    let log_mag = -ls * ls / (2.0 * s2) + ln_gamma_real(v) - ((2.0 * PI).sqrt() * sigma).ln() - n as f64 * ls;
    let mag = log_mag.exp();
    Ok(if n % 2 == 0 { mag } else { -mag })
}
