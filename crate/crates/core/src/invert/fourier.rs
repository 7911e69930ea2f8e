//! Fourier-type inversion: the damped cosine/sine series on a vertical
//! line, and the Gil-Pelaez CDF integral with its midpoint-sum (Davies)
//! discretisation.

use std::f64::consts::PI;

use num_complex::Complex64;

use crate::error::{Error, Result, Warning};
use crate::forward::{Engine, ModelTransform, Transform};
use crate::model::SumModel;
use crate::quad::{try_integrate, QuadConfig};
use crate::specfun::erfc;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SeriesVariant {
    Cosine,
    Sine,
}

/// Values with any non-fatal diagnostics raised while computing them.
#[derive(Debug, Clone, PartialEq)]
pub struct Inverted {
    pub values: Vec<f64>,
    pub warnings: Vec<Warning>,
}

pub const DEFAULT_SERIES_TERMS: usize = 2000;

/// Default `(c, L)` for abscissas up to `x_max`: `L = max(10, 2·x_max)`
/// keeps every abscissa inside half a period, and `c = 1/L`.
pub fn series_defaults(x_max: f64) -> (f64, f64) {
    let l = (2.0 * x_max).max(10.0);
    (1.0 / l, l)
}

/// Damped Fourier series on the line `Re s = c` with half-period `L`:
///
/// cosine: `f(x) = (2e^{cx}/L)·[½Re M(c) + Σ Re M(c + jkπ/L)·cos(kπx/L)]`
/// sine:   `f(x) = −(2e^{cx}/L)·Σ Im M(c + jkπ/L)·sin(kπx/L)`
pub fn fourier_series_invert<T: Transform + ?Sized>(
    t: &T,
    xs: &[f64],
    c: f64,
    l: f64,
    k: usize,
    variant: SeriesVariant,
) -> Result<Inverted> {
    if !(c > 0.0) {
        return Err(Error::domain(format!("contour abscissa must be positive, got {c}")));
    }
    if !(l > 0.0 && l.is_finite()) {
        return Err(Error::domain(format!("half-period must be positive, got {l}")));
    }
    if k < 32 {
        return Err(Error::invalid(format!("term count must be at least 32, got {k}")));
    }
    let mut warnings = Vec::new();
    for &x in xs {
        if !(x >= 0.0 && x.is_finite()) {
            return Err(Error::domain(format!("abscissa must be nonnegative, got {x}")));
        }
        if x > 0.5 * l {
            warnings.push(Warning::Aliasing { x, half_period: l });
        }
    }
    let samples = (0..=k)
        .map(|i| t.eval(Complex64::new(c, i as f64 * PI / l)))
        .collect::<Result<Vec<_>>>()?;
    let values = xs
        .iter()
        .map(|&x| {
            let scale = 2.0 * (c * x).exp() / l;
            let sum: f64 = match variant {
                SeriesVariant::Cosine => {
                    0.5 * samples[0].re
                        + samples.iter().enumerate().skip(1).map(|(i, m)| m.re * (i as f64 * PI * x / l).cos()).sum::<f64>()
                }
                SeriesVariant::Sine => {
                    -samples.iter().enumerate().skip(1).map(|(i, m)| m.im * (i as f64 * PI * x / l).sin()).sum::<f64>()
                }
            };
            scale * sum
        })
        .collect();
    Ok(Inverted { values, warnings })
}

/// Below this frequency the Gil-Pelaez integrand is replaced by its limit.
const LIMIT_OMEGA: f64 = 1e-6;
const GP_TOL: f64 = 1e-10;
const GP_MAX_PANELS: usize = 80;

/// `F(x) = ½ − (1/π)∫₀^∞ Im[e^{−jωx}φ(ω)]/ω dω`, integrated adaptively over
/// doubling panels until the envelope and the last panel are negligible.
pub fn gil_pelaez_cdf<F>(phi: F, x: f64) -> Result<f64>
where
    F: Fn(f64) -> Result<Complex64>,
{
    if !x.is_finite() {
        return Err(Error::domain(format!("abscissa must be finite, got {x}")));
    }
    // ω → 0: Im[e^{−jωx}φ]/ω → Im φ'(0) − x.
    let limit = phi(LIMIT_OMEGA)?.im / LIMIT_OMEGA - x;
    let g = |w: f64| -> Result<f64> {
        if w < LIMIT_OMEGA {
            return Ok(limit);
        }
        Ok((Complex64::from_polar(1.0, -w * x) * phi(w)?).im / w)
    };
    let cfg = QuadConfig { abs_tol: GP_TOL, rel_tol: 1e-12, max_intervals: 4000 };
    let mut total = 0.0;
    let (mut a, mut b) = (0.0, 1.0);
    for _ in 0..GP_MAX_PANELS {
        let part = try_integrate(g, a, b, cfg)?.value;
        total += part;
        let env = phi(b)?.norm() / b;
        if part.abs() < GP_TOL && env < GP_TOL {
            return Ok(0.5 - total / PI);
        }
        a = b;
        b *= 2.0;
    }
    Err(Error::Divergence(format!("Gil-Pelaez tail at x = {x} did not fall below {GP_TOL}")))
}

/// Output clamp slack for the series CDF.
pub const CDF_SLACK: f64 = 1e-3;

/// Cached characteristic-function samples at `ω_k = (k + ½)·d`.
///
/// `F(x) = ½ − Σ_k Im[φ(ω_k)e^{−jω_k x}] / (π(k + ½))`, the midpoint rule
/// for the Gil-Pelaez integral. The per-term `1/π` normalisation is the one
/// that reproduces `Φ(x)` for the standard normal.
#[derive(Debug, Clone, PartialEq)]
pub struct DaviesTable {
    pub d: f64,
    pub samples: Vec<Complex64>,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DaviesConfig {
    /// Target for both the aliased tail mass and the truncation error.
    pub tol: f64,
    pub max_terms: usize,
}

impl Default for DaviesConfig {
    fn default() -> Self {
        DaviesConfig { tol: 1e-4, max_terms: 1_000_000 }
    }
}

/// Consecutive samples that must satisfy the truncation bound.
const TRUNCATION_RUN: usize = 16;

impl DaviesTable {
    /// Samples for `k = 0..=n` at spacing `d`.
    pub fn new<F: Fn(f64) -> Result<Complex64>>(phi: F, d: f64, n: usize) -> Result<Self> {
        if !(d > 0.0 && d.is_finite()) {
            return Err(Error::domain(format!("grid spacing must be positive, got {d}")));
        }
        let samples = (0..=n).map(|k| phi((k as f64 + 0.5) * d)).collect::<Result<Vec<_>>>()?;
        Ok(DaviesTable { d, samples })
    }

    /// Chooses `d = 2π/T` with `T` above both `x_max` and the point where the
    /// tail mass falls to `tol`, and truncates where
    /// `|φ(ω)| ≤ tol·π·ω·x_min` holds over a run of samples.
    pub fn adaptive<F: Fn(f64) -> Result<Complex64>>(
        phi: F,
        tail_point: f64,
        x_min: f64,
        x_max: f64,
        cfg: DaviesConfig,
    ) -> Result<Self> {
        if !(x_min > 0.0 && x_max >= x_min) {
            return Err(Error::domain(format!("need 0 < x_min <= x_max, got [{x_min}, {x_max}]")));
        }
        let period = tail_point.max(1.01 * x_max);
        let d = 2.0 * PI / period;
        let mut samples = Vec::new();
        let mut run = 0;
        while run < TRUNCATION_RUN {
            if samples.len() >= cfg.max_terms {
                return Err(Error::Divergence(format!(
                    "characteristic function not below truncation bound within {} terms",
                    cfg.max_terms
                )));
            }
            let w = (samples.len() as f64 + 0.5) * d;
            let v = phi(w)?;
            run = if v.norm() <= cfg.tol * PI * w * x_min { run + 1 } else { 0 };
            samples.push(v);
        }
        Ok(DaviesTable { d, samples })
    }

    /// Table for a lognormal sum using the reduced-range engine.
    pub fn for_model(m: &SumModel, x_min: f64, x_max: f64, cfg: DaviesConfig) -> Result<Self> {
        let t = ModelTransform::new(m.clone(), Engine::ReducedRange);
        Self::adaptive(|w| t.chf(w), upper_tail_point(m, cfg.tol), x_min, x_max, cfg)
    }

    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }

    pub fn cdf_raw(&self, x: f64) -> f64 {
        let sum: f64 = self
            .samples
            .iter()
            .enumerate()
            .map(|(k, v)| {
                let h = k as f64 + 0.5;
                (v * Complex64::from_polar(1.0, -h * self.d * x)).im / (PI * h)
            })
            .sum();
        0.5 - sum
    }

    /// Clamped to `[0, 1]`; a warning reports raw values beyond the slack.
    pub fn cdf_checked(&self, x: f64) -> (f64, Option<Warning>) {
        let raw = self.cdf_raw(x);
        let warn = (raw < -CDF_SLACK || raw > 1.0 + CDF_SLACK).then_some(Warning::OutOfRange { x, raw });
        (raw.clamp(0.0, 1.0), warn)
    }

    pub fn cdf(&self, x: f64) -> f64 {
        self.cdf_checked(x).0
    }
}

/// Single-point series with explicit spacing and term count.
pub fn davies_cdf<F: Fn(f64) -> Result<Complex64>>(phi: F, x: f64, d: f64, n: usize) -> Result<f64> {
    Ok(DaviesTable::new(phi, d, n)?.cdf(x))
}

/// A point `T` with `P(Σ X_i > T) ≤ tol`, from the union bound
/// `Σ_i P(X_i > T/n)`.
pub fn upper_tail_point(m: &SumModel, tol: f64) -> f64 {
    let n = m.len() as f64;
    let tail = |ln_t: f64| -> f64 {
        m.components
            .iter()
            .map(|c| 0.5 * erfc((ln_t - n.ln() - c.mu) / (c.sigma * std::f64::consts::SQRT_2)))
            .sum()
    };
    let mut lo = m.components.iter().map(|c| c.mu).fold(f64::MAX, f64::min) + n.ln();
    let mut hi = lo + 1.0;
    while tail(hi) > tol {
        hi += 2.0 * (hi - lo);
    }
    for _ in 0..100 {
        let mid = 0.5 * (lo + hi);
        if tail(mid) > tol {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    hi.exp()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::forward::FnTransform;
    use crate::model::LognormalComponent;

    fn normal(w: f64) -> Result<Complex64> {
        Ok(Complex64::new((-0.5 * w * w).exp(), 0.0))
    }

    fn lognormal(sigma: f64) -> ModelTransform {
        ModelTransform::new(SumModel::single(LognormalComponent::standard(sigma).unwrap()), Engine::ReducedRange)
    }

    #[test]
    fn series_inverts_exponential() {
        let t = FnTransform(|s: Complex64| Ok(1.0 / (s + 1.0)));
        let xs = [0.5, 1.0, 2.0];
        let cos = fourier_series_invert(&t, &xs, 1.0, 20.0, 2000, SeriesVariant::Cosine).unwrap();
        // The sine series converges only as 1/K.
        let sin = fourier_series_invert(&t, &xs, 1.0, 20.0, 20000, SeriesVariant::Sine).unwrap();
        assert!((cos.values[1] - (-1f64).exp()).abs() < 1e-3);
        for i in 0..3 {
            assert!((cos.values[i] - sin.values[i]).abs() < 2e-3);
        }
        assert!(cos.warnings.is_empty());
        let far = fourier_series_invert(&t, &[15.0], 1.0, 20.0, 64, SeriesVariant::Cosine).unwrap();
        assert!(matches!(far.warnings[0], Warning::Aliasing { .. }));
    }

    #[test]
    fn series_lognormal_pdf_nonnegative() {
        let xs: Vec<f64> = (0..50).map(|i| 0.1 * 100f64.powf(i as f64 / 49.0)).collect();
        let r = fourier_series_invert(&lognormal(1.0), &xs, 0.05, 40.0, 4000, SeriesVariant::Cosine).unwrap();
        assert!(r.values.iter().all(|&v| v >= -1e-3));
    }

    #[test]
    fn series_rejects_bad_parameters() {
        let t = FnTransform(|s: Complex64| Ok(1.0 / (s + 1.0)));
        assert!(fourier_series_invert(&t, &[1.0], 0.0, 20.0, 64, SeriesVariant::Cosine).is_err());
        assert!(fourier_series_invert(&t, &[1.0], 1.0, 20.0, 8, SeriesVariant::Cosine).is_err());
    }

    #[test]
    fn gil_pelaez_normal() {
        assert!((gil_pelaez_cdf(normal, 0.0).unwrap() - 0.5).abs() < 1e-6);
        assert!((gil_pelaez_cdf(normal, 1.0).unwrap() - 0.841_344_746_068_543).abs() < 1e-5);
    }

    #[test]
    fn gil_pelaez_lognormal_median() {
        let t = lognormal(1.0);
        let v = gil_pelaez_cdf(|w| t.chf(w), 1.0).unwrap();
        assert!((v - 0.5).abs() < 1e-3, "{v}");
    }

    #[test]
    fn davies_normal_calibration() {
        let v = davies_cdf(normal, 1.0, 0.05, 400).unwrap();
        assert!((v - 0.841_344_746_068_543).abs() < 1e-10);
    }

    #[test]
    fn davies_lognormal_round_trip() {
        let m = SumModel::single(LognormalComponent::standard(1.0).unwrap());
        let table = DaviesTable::for_model(&m, 0.05, 20.0, DaviesConfig::default()).unwrap();
        let c = m.components[0];
        for x in [0.05, 0.3, 1.0, 4.0, 20.0] {
            let v = table.cdf(x);
            assert!((v - c.cdf(x).unwrap()).abs() < 1e-3, "x={x}: {v}");
        }
    }

    #[test]
    fn tail_point_bounds_mass() {
        let m = SumModel::single(LognormalComponent::standard(2.0).unwrap());
        let t = upper_tail_point(&m, 1e-4);
        let p = 1.0 - m.components[0].cdf(t).unwrap();
        assert!((p - 1e-4).abs() < 1e-8);
    }
}
