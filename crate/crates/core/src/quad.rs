//! Adaptive Gauss-Kronrod (10/21) quadrature for real and complex integrands.

use std::cmp::Ordering;
use std::collections::BinaryHeap;
use std::ops::{Add, Mul, Sub};

use num_complex::Complex64;

use crate::error::{Error, Result};

const XGK: [f64; 11] = [
    0.995_657_163_025_808_1,
    0.973_906_528_517_171_7,
    0.930_157_491_355_708_2,
    0.865_063_366_688_984_5,
    0.780_817_726_586_416_9,
    0.679_409_568_299_024_4,
    0.562_757_134_668_604_7,
    0.433_395_394_129_247_2,
    0.294_392_862_701_460_2,
    0.148_874_338_981_631_2,
    0.0,
];

const WGK: [f64; 11] = [
    0.011_694_638_867_371_874,
    0.032_558_162_307_964_73,
    0.054_755_896_574_352,
    0.075_039_674_810_919_95,
    0.093_125_454_583_697_6,
    0.109_387_158_802_297_64,
    0.123_491_976_262_065_85,
    0.134_709_217_311_473_33,
    0.142_775_938_577_060_08,
    0.147_739_104_901_338_49,
    0.149_445_554_002_916_9,
];

const WG: [f64; 5] = [
    0.066_671_344_308_688_14,
    0.149_451_349_150_580_6,
    0.219_086_362_515_982_04,
    0.269_266_719_309_996_35,
    0.295_524_224_714_752_87,
];

/// Values the integrator can accumulate.
pub trait Integrand: Copy + Add<Output = Self> + Sub<Output = Self> + Mul<f64, Output = Self> {
    fn zero() -> Self;
    fn magnitude(self) -> f64;
}

impl Integrand for f64 {
    fn zero() -> Self {
        0.0
    }
    fn magnitude(self) -> f64 {
        self.abs()
    }
}

impl Integrand for Complex64 {
    fn zero() -> Self {
        Complex64::new(0.0, 0.0)
    }
    fn magnitude(self) -> f64 {
        self.norm()
    }
}

#[derive(Debug, Clone, Copy)]
pub struct QuadConfig {
    pub abs_tol: f64,
    pub rel_tol: f64,
    pub max_intervals: usize,
}

impl Default for QuadConfig {
    fn default() -> Self {
        QuadConfig { abs_tol: 1e-12, rel_tol: 1e-12, max_intervals: 2000 }
    }
}

impl QuadConfig {
    pub fn with_tol(abs_tol: f64, rel_tol: f64) -> Self {
        QuadConfig { abs_tol, rel_tol, ..Default::default() }
    }
}

#[derive(Debug, Clone, Copy)]
pub struct QuadResult<T> {
    pub value: T,
    pub error: f64,
    pub evaluations: usize,
}

struct Panel<T> {
    a: f64,
    b: f64,
    value: T,
    error: f64,
}

impl<T> PartialEq for Panel<T> {
    fn eq(&self, other: &Self) -> bool {
        self.error == other.error
    }
}
impl<T> Eq for Panel<T> {}
impl<T> PartialOrd for Panel<T> {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}
impl<T> Ord for Panel<T> {
    fn cmp(&self, other: &Self) -> Ordering {
        self.error.total_cmp(&other.error)
    }
}

fn kronrod<T, F>(f: &mut F, a: f64, b: f64) -> Result<(T, f64)>
where
    T: Integrand,
    F: FnMut(f64) -> Result<T>,
{
    let c = 0.5 * (a + b);
    let h = 0.5 * (b - a);
    let fc = f(c)?;
    let mut k = fc * WGK[10];
    let mut g = T::zero();
    for i in 0..10 {
        let dx = h * XGK[i];
        let s = f(c - dx)? + f(c + dx)?;
        k = k + s * WGK[i];
        if i % 2 == 1 {
            g = g + s * WG[i / 2];
        }
    }
    let k = k * h;
    let g = g * h;
    let err = (k - g).magnitude();
    if !err.is_finite() || !k.magnitude().is_finite() {
        return Err(Error::Instability(format!("non-finite integrand on [{a}, {b}]")));
    }
    Ok((k, err))
}

/// Integrates a fallible integrand over `[a, b]`, bisecting the panel with
/// the largest error estimate until the total error meets the tolerance.
pub fn try_integrate<T, F>(mut f: F, a: f64, b: f64, cfg: QuadConfig) -> Result<QuadResult<T>>
where
    T: Integrand,
    F: FnMut(f64) -> Result<T>,
{
    if a == b {
        return Ok(QuadResult { value: T::zero(), error: 0.0, evaluations: 0 });
    }
    let (value, error) = kronrod(&mut f, a, b)?;
    let mut heap = BinaryHeap::new();
    heap.push(Panel { a, b, value, error });
    let mut total_err = error;
    let mut evaluations = 21;
    let mut total = value;
    loop {
        let tol = cfg.abs_tol.max(cfg.rel_tol * total.magnitude());
        if total_err <= tol {
            break;
        }
        if heap.len() >= cfg.max_intervals {
            return Err(Error::NonConvergence { what: "adaptive quadrature", iterations: heap.len() });
        }
        let worst = heap.pop().expect("heap is never empty");
        let m = 0.5 * (worst.a + worst.b);
        if m <= worst.a || m >= worst.b {
            // Panel can no longer be split in floating point.
            heap.push(worst);
            return Err(Error::NonConvergence { what: "adaptive quadrature", iterations: heap.len() });
        }
        let (v1, e1) = kronrod(&mut f, worst.a, m)?;
        let (v2, e2) = kronrod(&mut f, m, worst.b)?;
        evaluations += 42;
        total_err += e1 + e2 - worst.error;
        total = total + v1 + v2 - worst.value;
        heap.push(Panel { a: worst.a, b: m, value: v1, error: e1 });
        heap.push(Panel { a: m, b: worst.b, value: v2, error: e2 });
    }
    let mut value = T::zero();
    let mut error = 0.0;
    for p in heap.iter() {
        value = value + p.value;
        error += p.error;
    }
    Ok(QuadResult { value, error, evaluations })
}

pub fn integrate<T, F>(mut f: F, a: f64, b: f64, cfg: QuadConfig) -> Result<QuadResult<T>>
where
    T: Integrand,
    F: FnMut(f64) -> T,
{
    try_integrate(|x| Ok(f(x)), a, b, cfg)
}
