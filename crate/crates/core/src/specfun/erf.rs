use std::f64::consts::PI;

use num_complex::Complex64;

use crate::error::{Error, Result};

pub fn erf(x: f64) -> f64 {
    libm::erf(x)
}

pub fn erfc(x: f64) -> f64 {
    libm::erfc(x)
}

pub fn ln_gamma_real(x: f64) -> f64 {
    libm::lgamma(x)
}

pub fn gamma_real(x: f64) -> f64 {
    libm::tgamma(x)
}

// Stirling series coefficients B_{2k} / (2k(2k−1)).
const STIRLING: [f64; 8] = [
    1.0 / 12.0,
    -1.0 / 360.0,
    1.0 / 1260.0,
    -1.0 / 1680.0,
    1.0 / 1188.0,
    -691.0 / 360_360.0,
    1.0 / 156.0,
    -3617.0 / 122_400.0,
];

/// `ln Γ(z)` for `Re z > 0`: upward recurrence to `Re z ≥ 15`, then Stirling.
pub fn log_gamma(z: Complex64) -> Result<Complex64> {
    if !(z.re > 0.0) || !z.im.is_finite() {
        return Err(Error::domain(format!("log_gamma needs Re z > 0, got {z}")));
    }
    let shift = (15.0 - z.re).ceil().max(0.0) as usize;
    let mut prod = Complex64::new(1.0, 0.0);
    let mut log_prod = Complex64::new(0.0, 0.0);
    for k in 0..shift {
        prod *= z + k as f64;
        if prod.norm() > 1e250 {
            log_prod += prod.ln();
            prod = Complex64::new(1.0, 0.0);
        }
    }
    log_prod += prod.ln();
    let w = z + shift as f64;
    let inv = 1.0 / w;
    let inv2 = inv * inv;
    let mut series = Complex64::new(0.0, 0.0);
    let mut p = inv;
    for c in STIRLING {
        series += c * p;
        p *= inv2;
    }
    Ok((w - 0.5) * w.ln() - w + 0.5 * (2.0 * PI).ln() + series - log_prod)
}
