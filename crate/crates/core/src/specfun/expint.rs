use num_complex::Complex64;

use super::EULER_GAMMA;
use crate::error::{Error, Result};

const CF_MAX_ITER: usize = 5000;

fn use_series(z: Complex64) -> bool {
    let r = z.norm();
    r <= 2.0 || (z.re < 0.0 && z.im.abs() < 0.5 * r)
}

fn series(z: Complex64) -> Complex64 {
    // E1(z) = -γ - ln z - Σ_{n≥1} (-z)^n / (n·n!)
    let mut term = Complex64::new(1.0, 0.0);
    let mut sum = Complex64::new(0.0, 0.0);
    for n in 1..1000 {
        let nf = n as f64;
        term *= -z / nf;
        let add = term / nf;
        sum += add;
        if add.norm() <= 1e-17 * sum.norm() {
            break;
        }
    }
    -EULER_GAMMA - z.ln() - sum
}

/// `e^z·E1(z)` from the continued fraction, by modified Lentz.
fn continued_fraction(z: Complex64) -> Result<Complex64> {
    let tiny = 1e-300;
    let mut b = z + 1.0;
    let mut c = Complex64::new(1.0 / tiny, 0.0);
    let mut d = 1.0 / b;
    let mut h = d;
    for i in 1..CF_MAX_ITER {
        let an = -((i * i) as f64);
        b += 2.0;
        d = 1.0 / (d * an + b);
        c = b + an / c;
        let delta = c * d;
        h *= delta;
        if (delta - 1.0).norm() < 1e-16 {
            return Ok(h);
        }
    }
    Err(Error::NonConvergence { what: "E1 continued fraction", iterations: CF_MAX_ITER })
}

/// Complex exponential integral `E1(z) = ∫_z^∞ e^{−t}/t dt`, principal branch.
///
/// On the negative real axis the value from the upper side (`Im z = +0`) is
/// returned; see [`near_branch_cut`].
pub fn expint_e1(z: Complex64) -> Result<Complex64> {
    if z.norm() == 0.0 {
        return Err(Error::domain("E1 is singular at z = 0"));
    }
    if z.re.is_nan() || z.im.is_nan() {
        return Err(Error::domain("E1 of NaN"));
    }
    if use_series(z) {
        Ok(series(z))
    } else {
        Ok(continued_fraction(z)? * (-z).exp())
    }
}

/// Scaled exponential integral `e^z·E1(z)`, finite for large `Re z`.
pub fn expint_e1_scaled(z: Complex64) -> Result<Complex64> {
    if z.norm() == 0.0 {
        return Err(Error::domain("E1 is singular at z = 0"));
    }
    if z.re.is_nan() || z.im.is_nan() {
        return Err(Error::domain("E1 of NaN"));
    }
    if use_series(z) {
        Ok(series(z) * z.exp())
    } else {
        continued_fraction(z)
    }
}

/// True when `z` is within a relative distance `rel` of the negative real axis.
pub fn near_branch_cut(z: Complex64, rel: f64) -> bool {
    z.re < 0.0 && z.im.abs() <= rel * z.norm()
}
