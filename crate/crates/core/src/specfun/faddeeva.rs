use std::f64::consts::PI;
use std::sync::OnceLock;

use num_complex::Complex64;

use crate::error::{Error, Result};

const N_TERMS: usize = 40;

struct Weideman {
    l: f64,
    coeffs: [f64; N_TERMS],
}

fn table() -> &'static Weideman {
    static TABLE: OnceLock<Weideman> = OnceLock::new();
    TABLE.get_or_init(|| {
        let n = N_TERMS;
        let m = 2 * n;
        let l = (n as f64 / 2f64.sqrt()).sqrt();
        let f = |k: i64| {
            if k == -(m as i64) {
                return 0.0;
            }
            let t = l * (k as f64 * PI / (2.0 * m as f64)).tan();
            (-t * t).exp() * (l * l + t * t)
        };
        let mut coeffs = [0.0; N_TERMS];
        for (i, c) in coeffs.iter_mut().enumerate() {
            let nn = (i + 1) as f64;
            let mut s = 0.0;
            for k in -(m as i64)..(m as i64) {
                s += f(k) * (PI * k as f64 * nn / m as f64).cos();
            }
            *c = s / (2 * m) as f64;
        }
        Weideman { l, coeffs }
    })
}

fn w_upper(z: Complex64) -> Complex64 {
    let t = table();
    let j = Complex64::new(0.0, 1.0);
    let denom = t.l - j * z;
    let zz = (t.l + j * z) / denom;
    let mut p = Complex64::new(0.0, 0.0);
    for &c in t.coeffs.iter().rev() {
        p = p * zz + c;
    }
    2.0 * p / (denom * denom) + 1.0 / (PI.sqrt() * denom)
}

/// Faddeeva function `w(z) = e^{−z²}·erfc(−jz)` by Weideman's rational expansion.
pub fn faddeeva_w(z: Complex64) -> Result<Complex64> {
    if z.im >= 0.0 {
        return Ok(w_upper(z));
    }
    let e = (-z * z).exp();
    if !(e.re.is_finite() && e.im.is_finite()) {
        return Err(Error::Instability(format!("Faddeeva reflection overflows at {z}")));
    }
    Ok(2.0 * e - w_upper(-z))
}

/// Scaled complementary error function `erfcx(z) = e^{z²}·erfc(z) = w(jz)`.
pub fn erfcx(z: Complex64) -> Result<Complex64> {
    faddeeva_w(Complex64::new(-z.im, z.re))
}
