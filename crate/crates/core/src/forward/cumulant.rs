//! Cumulant curve `X1 + jX2 = log φ(ω)` with its first and second
//! frequency derivatives.

use std::f64::consts::{FRAC_PI_2, PI};

use num_complex::Complex64;

use super::{Engine, ModelTransform, Transform};
use crate::error::{Error, Result};
use crate::model::SumModel;

const REL_STEP: f64 = 0.02;
const MAX_BISECTIONS: u32 = 24;
/// Largest first grid point that still anchors the phase at the origin.
pub const MAX_FIRST_OMEGA: f64 = 1e-4;

#[derive(Debug, Clone, PartialEq)]
pub struct CumulantCurve {
    pub omegas: Vec<f64>,
    pub x1: Vec<f64>,
    pub x2: Vec<f64>,
    /// Attenuation constant `−dX1/dω`.
    pub a1: Vec<f64>,
    /// Group delay `dX2/dω`.
    pub b1: Vec<f64>,
    /// `−X1''/2`.
    pub a2: Vec<f64>,
    /// `X2''/2`.
    pub b2: Vec<f64>,
}

impl CumulantCurve {
    pub fn len(&self) -> usize {
        self.omegas.len()
    }

    pub fn is_empty(&self) -> bool {
        self.omegas.is_empty()
    }

    /// Cubic Hermite interpolation of `X1 + jX2` using the stored slopes.
    /// Below the first grid point the cumulant is continued linearly to
    /// zero at the origin; above the last it is `None`.
    pub fn interpolate(&self, w: f64) -> Option<Complex64> {
        let n = self.omegas.len();
        if n == 0 || !(w >= 0.0) || w > self.omegas[n - 1] {
            return None;
        }
        if w <= self.omegas[0] {
            return Some(self.cumulant(0) * (w / self.omegas[0]));
        }
        let i = self.omegas.partition_point(|&o| o <= w).min(n - 1);
        let (w0, w1) = (self.omegas[i - 1], self.omegas[i]);
        let h = w1 - w0;
        let t = (w - w0) / h;
        let (t2, t3) = (t * t, t * t * t);
        let h00 = 2.0 * t3 - 3.0 * t2 + 1.0;
        let h10 = t3 - 2.0 * t2 + t;
        let h01 = -2.0 * t3 + 3.0 * t2;
        let h11 = t3 - t2;
        let x1 = h00 * self.x1[i - 1] + h10 * h * -self.a1[i - 1] + h01 * self.x1[i] + h11 * h * -self.a1[i];
        let x2 = h00 * self.x2[i - 1] + h10 * h * self.b1[i - 1] + h01 * self.x2[i] + h11 * h * self.b1[i];
        Some(Complex64::new(x1, x2))
    }

    /// Complex cumulant at grid index `i`.
    pub fn cumulant(&self, i: usize) -> Complex64 {
        Complex64::new(self.x1[i], self.x2[i])
    }
}

/// Principal logarithm of the characteristic function of a sum.
pub fn log_chf(m: &SumModel, omega: f64) -> Result<Complex64> {
    Ok(ModelTransform::new(m.clone(), Engine::ReducedRange).chf(omega)?.ln())
}

/// Cumulant curve of `m` using the reduced-range engine.
pub fn cumulants(m: &SumModel, omegas: &[f64]) -> Result<CumulantCurve> {
    cumulants_with(&ModelTransform::new(m.clone(), Engine::ReducedRange), omegas)
}

pub fn cumulants_with<T: Transform>(t: &T, omegas: &[f64]) -> Result<CumulantCurve> {
    if omegas.is_empty() {
        return Err(Error::invalid("empty frequency grid"));
    }
    if !(omegas[0] > 0.0 && omegas[0] <= MAX_FIRST_OMEGA) {
        return Err(Error::invalid(format!("first frequency must lie in (0, {MAX_FIRST_OMEGA}], got {}", omegas[0])));
    }
    if omegas.windows(2).any(|w| !(w[1] > w[0])) || omegas.iter().any(|w| !w.is_finite()) {
        return Err(Error::invalid("frequency grid must be finite and strictly increasing"));
    }

    let n = omegas.len();
    let mut curve = CumulantCurve {
        omegas: omegas.to_vec(),
        x1: Vec::with_capacity(n),
        x2: Vec::with_capacity(n),
        a1: Vec::with_capacity(n),
        b1: Vec::with_capacity(n),
        a2: Vec::with_capacity(n),
        b2: Vec::with_capacity(n),
    };

    let mut phase = 0.0;
    let mut prev = (0.0, Complex64::new(1.0, 0.0), group_delay(t, 0.0)?);
    for &w in omegas {
        let phi = t.chf(w)?;
        let d = derivatives(t, w, phi)?;
        let next = (w, phi, d[1]);
        phase += unwrap_step(t, prev, next, 0)?;
        curve.x1.push(phi.norm().ln());
        curve.x2.push(phase);
        curve.a1.push(-d[0]);
        curve.b1.push(d[1]);
        curve.a2.push(-0.5 * d[2]);
        curve.b2.push(0.5 * d[3]);
        prev = next;
    }
    Ok(curve)
}

/// `dX2/dω` from a single central difference; used only to bound the
/// phase turn between samples.
fn group_delay<T: Transform>(t: &T, w: f64) -> Result<f64> {
    let h = 1e-3 * w.max(1e-3);
    let lo = (w - h).max(0.0);
    Ok((t.chf(w + h)? / t.chf(lo)?).arg() / (w + h - lo))
}

/// Phase increment between two samples `(ω, φ, dX2/dω)`, bisecting until
/// each sub-step turns by less than π/2 both as measured and as predicted
/// from the group delay. The prediction catches whole turns that the
/// measured increment cannot see.
fn unwrap_step<T: Transform>(t: &T, p0: (f64, Complex64, f64), p1: (f64, Complex64, f64), depth: u32) -> Result<f64> {
    let d = (p1.1 / p0.1).arg();
    let predicted = 0.5 * (p0.2 + p1.2) * (p1.0 - p0.0);
    let bound = p0.2.abs().max(p1.2.abs()) * (p1.0 - p0.0);
    if d.abs() < FRAC_PI_2 && bound < FRAC_PI_2 && (d - predicted).abs() < FRAC_PI_2 {
        return Ok(d);
    }
    if depth >= MAX_BISECTIONS {
        return Err(Error::PhaseUnwrap(p1.0));
    }
    let wm = 0.5 * (p0.0 + p1.0);
    let pm = (wm, t.chf(wm)?, group_delay(t, wm)?);
    Ok(unwrap_step(t, p0, pm, depth + 1)? + unwrap_step(t, pm, p1, depth + 1)?)
}

/// `[X1', X2', X1'', X2'']` by central differences with one Richardson step.
fn derivatives<T: Transform>(t: &T, w: f64, phi: Complex64) -> Result<[f64; 4]> {
    let at = |h: f64| -> Result<[f64; 4]> {
        let up = (t.chf(w + h)? / phi).ln();
        let dn = (t.chf(w - h)? / phi).ln();
        if up.im.abs() >= PI / 2.0 || dn.im.abs() >= PI / 2.0 {
            return Err(Error::PhaseUnwrap(w));
        }
        Ok([
            (up.re - dn.re) / (2.0 * h),
            (up.im - dn.im) / (2.0 * h),
            (up.re + dn.re) / (h * h),
            (up.im + dn.im) / (h * h),
        ])
    };
    let h = REL_STEP * w;
    let coarse = at(h)?;
    let fine = at(0.5 * h)?;
    Ok(std::array::from_fn(|i| (4.0 * fine[i] - coarse[i]) / 3.0))
}
