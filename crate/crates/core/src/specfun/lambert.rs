use std::f64::consts::{E, PI};

use num_complex::Complex64;

use crate::error::{Error, Result};

const MAX_ITER: usize = 64;
const RESIDUAL_TOL: f64 = 1e-13;

/// Principal branch of the real Lambert W function, `W·e^W = y` for `y ≥ −1/e`.
pub fn lambert_w_real(y: f64) -> Result<f64> {
    let branch = -1.0 / E;
    if y.is_nan() || y < branch - 4.0 * f64::EPSILON {
        return Err(Error::domain(format!("lambert_w_real needs y >= -1/e, got {y}")));
    }
    if y <= branch {
        return Ok(-1.0);
    }
    if y == 0.0 {
        return Ok(0.0);
    }
    if y.is_infinite() {
        return Err(Error::domain("lambert_w_real of infinity"));
    }

    let mut w = if y < -0.25 {
        let p = (2.0 * (E * y + 1.0)).max(0.0).sqrt();
        -1.0 + p - p * p / 3.0 + 11.0 / 72.0 * p * p * p
    } else if y < 3.0 {
        let l = y.ln_1p();
        l * (1.0 - l.ln_1p() / (2.0 + l))
    } else {
        let l1 = y.ln();
        let l2 = l1.ln();
        l1 - l2 + l2 / l1
    };

    for _ in 0..MAX_ITER {
        let ew = w.exp();
        let f = w * ew - y;
        let wp1 = w + 1.0;
        if wp1 == 0.0 {
            break;
        }
        let denom = ew * wp1 - (w + 2.0) * f / (2.0 * wp1);
        let step = f / denom;
        w -= step;
        if !w.is_finite() {
            return Err(Error::NonConvergence { what: "real Lambert W", iterations: MAX_ITER });
        }
        if step.abs() <= 4.0 * f64::EPSILON * (1.0 + w.abs()) {
            break;
        }
    }
    let res = (w * w.exp() - y).abs();
    if res > RESIDUAL_TOL * y.abs().max(1.0) && (w + 1.0).abs() > 1e-6 {
        return Err(Error::NonConvergence { what: "real Lambert W", iterations: MAX_ITER });
    }
    Ok(w)
}

fn is_principal(w: Complex64) -> bool {
    let (xi, eta) = (w.re, w.im);
    if eta.abs() >= PI {
        return false;
    }
    if eta == 0.0 {
        return xi >= -1.0 - 1e-12;
    }
    xi >= -eta / eta.tan() - 1e-9 * (1.0 + xi.abs())
}

fn halley(z: Complex64, mut w: Complex64) -> Option<Complex64> {
    let one = Complex64::new(1.0, 0.0);
    for _ in 0..MAX_ITER {
        let ew = w.exp();
        let f = w * ew - z;
        let wp1 = w + one;
        if wp1.norm() == 0.0 {
            return Some(w);
        }
        let denom = ew * wp1 - (w + 2.0) * f / (wp1 * 2.0);
        let step = f / denom;
        w -= step;
        if !(w.re.is_finite() && w.im.is_finite()) {
            return None;
        }
        if step.norm() <= 4.0 * f64::EPSILON * (1.0 + w.norm()) {
            return Some(w);
        }
    }
    let res = (w * w.exp() - z).norm();
    (res <= RESIDUAL_TOL * z.norm().max(1.0)).then_some(w)
}

/// Principal branch of the complex Lambert W function.
pub fn lambert_w0(z: Complex64) -> Result<Complex64> {
    if z.re.is_nan() || z.im.is_nan() {
        return Err(Error::domain("lambert_w0 of NaN"));
    }
    if z.norm() == 0.0 {
        return Ok(Complex64::new(0.0, 0.0));
    }
    let one = Complex64::new(1.0, 0.0);
    let near_branch = || {
        let p = (z * (2.0 * E) + 2.0).sqrt();
        -one + p - p * p / 3.0 + p * p * p * (11.0 / 72.0)
    };
    let small = || z - z * z + z * z * z * 1.5;
    let asymptotic = || {
        let l1 = z.ln();
        let l2 = l1.ln();
        l1 - l2 + l2 / l1
    };
    let seeds: [Complex64; 3] = if (z + 1.0 / E).norm() < 0.3 {
        [near_branch(), small(), asymptotic()]
    } else if z.norm() < 0.5 {
        [small(), near_branch(), asymptotic()]
    } else {
        [asymptotic(), near_branch(), small()]
    };
    for seed in seeds {
        if let Some(w) = halley(z, seed) {
            if is_principal(w) {
                return Ok(w);
            }
        }
    }
    Err(Error::NonConvergence { what: "complex Lambert W", iterations: MAX_ITER })
}

/// Saddle point `z` with `z·exp(−z) = ζ`, taken as `z = −W0(−ζ)`.
///
/// For `ζ = jωσ²` with `ω ≥ 0` the result lies in the second quadrant and
/// moves continuously with `ω`.
pub fn lambert_saddle(zeta: Complex64) -> Result<Complex64> {
    if zeta.norm() == 0.0 {
        return Ok(Complex64::new(0.0, 0.0));
    }
    Ok(-lambert_w0(-zeta)?)
}
